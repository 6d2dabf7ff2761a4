use std::collections::BTreeMap;

use super::NetStatsError;
use crate::ingest::VenueIx;
use crate::snapshot::{sorted_intersection_count, PlaceGraph, Topology};

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    /// Mean of the local coefficients over all nodes.
    pub mean: f64,
    pub per_node: BTreeMap<VenueIx, f64>,
}

pub(crate) fn local_clustering(t: &Topology) -> Vec<f64> {
    (0..t.len())
        .map(|u| {
            let nbrs = t.neighbors(u);
            let k = nbrs.len();
            if k < 2 {
                return 0.0;
            }
            // each triangle through u is seen from both of its other corners
            let twice_triangles: usize = nbrs
                .iter()
                .map(|&v| sorted_intersection_count(nbrs, t.neighbors(v)))
                .sum();
            twice_triangles as f64 / (k * (k - 1)) as f64
        })
        .collect()
}

pub(crate) fn mean_clustering(t: &Topology) -> f64 {
    let c = local_clustering(t);
    c.iter().sum::<f64>() / c.len() as f64
}

/// Local clustering `c_u = triangles(u) / C(k_u, 2)` (0 when `k_u < 2`) on
/// the undirected projection, and its mean over every node.
pub fn clustering_coefficient(graph: &PlaceGraph) -> Result<Clustering, NetStatsError> {
    if graph.is_empty() {
        return Err(NetStatsError::EmptyGraph);
    }
    let t = graph.topology();
    let local = local_clustering(&t);
    let mean = local.iter().sum::<f64>() / local.len() as f64;
    Ok(Clustering {
        mean,
        per_node: t.venues().iter().copied().zip(local).collect(),
    })
}

pub(crate) fn degree_assortativity(t: &Topology) -> Result<f64, NetStatsError> {
    // Sums over both orientations of every undirected edge, in exact integers.
    let (mut m, mut sx, mut sxx, mut sxy) = (0i128, 0i128, 0i128, 0i128);
    for (a, b) in t.undirected_edges() {
        let (ka, kb) = (t.degree(a) as i128, t.degree(b) as i128);
        m += 2;
        sx += ka + kb;
        sxx += ka * ka + kb * kb;
        sxy += 2 * ka * kb;
    }
    let var = m * sxx - sx * sx;
    if m == 0 || var == 0 {
        return Err(NetStatsError::Undefined("assortativity"));
    }
    let cov = m * sxy - sx * sx;
    Ok(cov as f64 / var as f64)
}

/// Pearson correlation of the degrees at either end of each undirected edge,
/// counting both orientations. Undefined when all end degrees are equal.
pub fn assortativity(graph: &PlaceGraph) -> Result<f64, NetStatsError> {
    degree_assortativity(&graph.topology())
}
