use std::collections::{BTreeSet, VecDeque};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::NetStatsError;
use crate::ingest::VenueIx;
use crate::snapshot::{PlaceGraph, Topology};

/// Components up to this size get exact all-sources BFS.
pub const EXACT_PATH_LIMIT: usize = 5000;

#[derive(Debug, Clone, PartialEq)]
pub struct GiantComponent {
    pub nodes: BTreeSet<VenueIx>,
    pub fraction: f64,
}

/// Component membership on the undirected projection; components are
/// numbered in order of their smallest node.
fn components(t: &Topology) -> Vec<Vec<usize>> {
    let mut seen = vec![false; t.len()];
    let mut out = Vec::new();
    for s in 0..t.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            i += 1;
            for &v in t.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Largest component; ties go to the component holding the smallest node.
pub(crate) fn largest_component(t: &Topology) -> Vec<usize> {
    let mut best: Vec<usize> = Vec::new();
    for c in components(t) {
        if c.len() > best.len() {
            best = c;
        }
    }
    best
}

/// Largest weakly connected component of the directed graph.
pub fn giant_component(graph: &PlaceGraph) -> Result<GiantComponent, NetStatsError> {
    if graph.is_empty() {
        return Err(NetStatsError::EmptyGraph);
    }
    let t = graph.topology();
    let gc = largest_component(&t);
    Ok(GiantComponent {
        fraction: gc.len() as f64 / t.len() as f64,
        nodes: gc.into_iter().map(|i| t.venue(i)).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathStats {
    /// Mean finite distance over all explored ordered pairs.
    pub mean_shortest_path: f64,
    /// Largest eccentricity seen; a lower bound when `exact` is false.
    pub diameter: u32,
    pub exact: bool,
    pub sources: usize,
    pub component_size: usize,
}

fn bfs(t: &Topology, src: usize, dist: &mut [u32], queue: &mut VecDeque<usize>) -> (u64, u64, u32) {
    dist.fill(u32::MAX);
    dist[src] = 0;
    queue.clear();
    queue.push_back(src);
    let (mut sum, mut count, mut ecc) = (0u64, 0u64, 0u32);
    while let Some(u) = queue.pop_front() {
        let du = dist[u];
        for &v in t.neighbors(u) {
            if dist[v] == u32::MAX {
                dist[v] = du + 1;
                sum += (du + 1) as u64;
                count += 1;
                ecc = ecc.max(du + 1);
                queue.push_back(v);
            }
        }
    }
    (sum, count, ecc)
}

pub(crate) fn topology_path_stats(
    t: &Topology,
    sample_sources: usize,
    seed: u64,
) -> Result<PathStats, NetStatsError> {
    let gc = largest_component(t);
    if gc.len() < 2 {
        return Err(NetStatsError::Undefined("path statistics"));
    }
    let exact = gc.len() <= EXACT_PATH_LIMIT || sample_sources >= gc.len();
    let sources: Vec<usize> = if exact {
        gc.clone()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked: Vec<usize> = sample(&mut rng, gc.len(), sample_sources.max(1))
            .into_iter()
            .map(|k| gc[k])
            .collect();
        picked.sort_unstable();
        picked
    };
    let mut dist = vec![u32::MAX; t.len()];
    let mut queue = VecDeque::new();
    let (mut sum, mut count, mut diameter) = (0u64, 0u64, 0u32);
    for &s in &sources {
        let (s_sum, s_count, ecc) = bfs(t, s, &mut dist, &mut queue);
        sum += s_sum;
        count += s_count;
        diameter = diameter.max(ecc);
    }
    Ok(PathStats {
        mean_shortest_path: sum as f64 / count as f64,
        diameter,
        exact,
        sources: sources.len(),
        component_size: gc.len(),
    })
}

/// Mean shortest path and diameter of the giant component (undirected).
///
/// Components of at most [`EXACT_PATH_LIMIT`] nodes are explored from every
/// node; larger ones from `sample_sources` nodes drawn with `seed`.
pub fn path_stats(graph: &PlaceGraph, sample_sources: usize, seed: u64) -> Result<PathStats, NetStatsError> {
    if graph.is_empty() {
        return Err(NetStatsError::EmptyGraph);
    }
    topology_path_stats(&graph.topology(), sample_sources, seed)
}
