//! Snapshot files: a TSV edge list `origin<TAB>dest<TAB>weight` and a JSON
//! sidecar with the window bounds and sizes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{PlaceGraph, SnapshotError, Window};
use crate::ingest::VenueRegistry;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub index: usize,
    pub t_start: i64,
    pub t_end: i64,
    pub n_nodes: usize,
    pub n_edges: usize,
    pub total_weight: u64,
}

fn io_err(path: &Path, e: std::io::Error) -> SnapshotError {
    SnapshotError::Io(format!("{}: {e}", path.display()))
}

/// Writes `<stem>.tsv` and `<stem>.json`, returning both paths.
pub fn write_snapshot(
    graph: &PlaceGraph,
    index: usize,
    registry: &VenueRegistry,
    dir: &Path,
    stem: &str,
) -> Result<(PathBuf, PathBuf), SnapshotError> {
    let tsv = dir.join(format!("{stem}.tsv"));
    let json = dir.join(format!("{stem}.json"));
    let mut buf = Vec::new();
    for (&(o, d), &w) in graph.edges() {
        writeln!(buf, "{}\t{}\t{}", registry.id(o), registry.id(d), w).expect("write to Vec");
    }
    fs::write(&tsv, buf).map_err(|e| io_err(&tsv, e))?;
    let meta = SnapshotMeta {
        index,
        t_start: graph.window().start,
        t_end: graph.window().end,
        n_nodes: graph.node_count(),
        n_edges: graph.edge_count(),
        total_weight: graph.total_weight(),
    };
    let mut text = serde_json::to_string_pretty(&serde_json::to_value(&meta).expect("meta serializes"))
        .expect("meta serializes");
    text.push('\n');
    fs::write(&json, text).map_err(|e| io_err(&json, e))?;
    Ok((tsv, json))
}

/// Reads one snapshot back. Every edge endpoint must resolve in `registry`.
pub fn read_snapshot(
    tsv: &Path,
    json: &Path,
    registry: &VenueRegistry,
) -> Result<(SnapshotMeta, PlaceGraph), SnapshotError> {
    let meta_text = fs::read_to_string(json).map_err(|e| io_err(json, e))?;
    let meta: SnapshotMeta = serde_json::from_str(&meta_text).map_err(|e| SnapshotError::Parse {
        path: json.display().to_string(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let text = fs::read_to_string(tsv).map_err(|e| io_err(tsv, e))?;
    let parse_err = |line: usize, message: String| SnapshotError::Parse {
        path: tsv.display().to_string(),
        line,
        message,
    };
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(parse_err(i + 1, format!("expected 3 tab-separated fields, got {}", fields.len())));
        }
        let o = registry
            .lookup(fields[0])
            .ok_or_else(|| parse_err(i + 1, format!("unknown venue `{}`", fields[0])))?;
        let d = registry
            .lookup(fields[1])
            .ok_or_else(|| parse_err(i + 1, format!("unknown venue `{}`", fields[1])))?;
        let w: u64 = fields[2]
            .parse()
            .map_err(|_| parse_err(i + 1, format!("bad weight `{}`", fields[2])))?;
        edges.push((o, d, w));
    }
    let graph = PlaceGraph::from_weighted_edges(Window::new(meta.t_start, meta.t_end), edges);
    Ok((meta, graph))
}

pub fn snapshot_stem(index: usize) -> String {
    format!("snapshot_{index:03}")
}

/// Writes every snapshot as `snapshot_NNN.{tsv,json}` under `dir`.
pub fn write_snapshot_dir(
    graphs: &[PlaceGraph],
    registry: &VenueRegistry,
    dir: &Path,
) -> Result<Vec<PathBuf>, SnapshotError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut written = Vec::new();
    for (i, g) in graphs.iter().enumerate() {
        let (a, b) = write_snapshot(g, i, registry, dir, &snapshot_stem(i))?;
        written.push(a);
        written.push(b);
    }
    Ok(written)
}

/// Loads `snapshot_000`, `snapshot_001`, ... until the first missing index.
pub fn read_snapshot_dir(dir: &Path, registry: &VenueRegistry) -> Result<Vec<PlaceGraph>, SnapshotError> {
    if !dir.is_dir() {
        return Err(SnapshotError::Io(format!("{}: snapshot directory not found", dir.display())));
    }
    let mut graphs = Vec::new();
    loop {
        let stem = snapshot_stem(graphs.len());
        let tsv = dir.join(format!("{stem}.tsv"));
        let json = dir.join(format!("{stem}.json"));
        if !tsv.exists() || !json.exists() {
            break;
        }
        graphs.push(read_snapshot(&tsv, &json, registry)?.1);
    }
    if graphs.is_empty() {
        return Err(SnapshotError::Io(format!(
            "{}: no snapshot files (expected snapshot_000.tsv)",
            dir.display()
        )));
    }
    Ok(graphs)
}
