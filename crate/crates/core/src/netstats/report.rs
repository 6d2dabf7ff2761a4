use serde::Serialize;

use super::paths::{largest_component, topology_path_stats};
use super::rewire::rewire_topology;
use super::structure::{degree_assortativity, mean_clustering};
use super::{NetStatsError, DEFAULT_SWAPS_PER_EDGE};
use crate::snapshot::PlaceGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct TopologyOptions {
    /// BFS sources when the giant component exceeds the exact limit.
    pub path_sources: usize,
    pub seed: u64,
    /// Number of rewired null models; zero skips them.
    pub null_seeds: usize,
    pub swaps_per_edge: usize,
}

impl Default for TopologyOptions {
    fn default() -> Self {
        TopologyOptions {
            path_sources: 1000,
            seed: 0,
            null_seeds: 0,
            swaps_per_edge: DEFAULT_SWAPS_PER_EDGE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopologyReport {
    pub n_nodes: usize,
    /// Directed edges.
    pub n_edges: usize,
    pub n_undirected_edges: usize,
    pub mean_clustering: f64,
    pub diameter_estimate: u32,
    pub diameter_is_exact: bool,
    pub path_sources: usize,
    pub mean_shortest_path: f64,
    /// Mean undirected degree.
    pub mean_degree: f64,
    /// `None` when undefined (constant end degrees).
    pub assortativity: Option<f64>,
    pub giant_component_fraction: f64,
    pub null_models: usize,
    pub null_model_clustering: Option<f64>,
    pub null_diameter: Option<f64>,
    pub null_mean_path: Option<f64>,
}

/// Table-style summary of one snapshot, optionally with rewired null models
/// averaged over `null_seeds` seeds (`seed`, `seed + 1`, ...).
pub fn topology_report(graph: &PlaceGraph, opts: &TopologyOptions) -> Result<TopologyReport, NetStatsError> {
    if graph.is_empty() {
        return Err(NetStatsError::EmptyGraph);
    }
    let t = graph.topology();
    let paths = topology_path_stats(&t, opts.path_sources, opts.seed)?;
    let undirected = t.undirected_edge_count();

    let (mut c_r, mut d_r, mut p_r) = (0.0, 0.0, 0.0);
    for k in 0..opts.null_seeds {
        let seed = opts.seed.wrapping_add(k as u64);
        let r = rewire_topology(&t, seed, opts.swaps_per_edge);
        c_r += mean_clustering(&r);
        let rp = topology_path_stats(&r, opts.path_sources, opts.seed)?;
        d_r += rp.diameter as f64;
        p_r += rp.mean_shortest_path;
    }
    let k = opts.null_seeds as f64;
    let null = |x: f64| (opts.null_seeds > 0).then(|| x / k);

    Ok(TopologyReport {
        n_nodes: t.len(),
        n_edges: graph.edge_count(),
        n_undirected_edges: undirected,
        mean_clustering: mean_clustering(&t),
        diameter_estimate: paths.diameter,
        diameter_is_exact: paths.exact,
        path_sources: paths.sources,
        mean_shortest_path: paths.mean_shortest_path,
        mean_degree: 2.0 * undirected as f64 / t.len() as f64,
        assortativity: degree_assortativity(&t).ok(),
        giant_component_fraction: largest_component(&t).len() as f64 / t.len() as f64,
        null_models: opts.null_seeds,
        null_model_clustering: null(c_r),
        null_diameter: null(d_r),
        null_mean_path: null(p_r),
    })
}
