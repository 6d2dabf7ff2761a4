use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::snapshot::{PlaceGraph, Topology};

pub const DEFAULT_SWAPS_PER_EDGE: usize = 10;

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Runs exactly `attempts` double-edge swaps over the undirected edge list,
/// rejecting any swap that would create a self-loop or a multi-edge.
/// Returns the number of accepted swaps.
pub(crate) fn double_edge_swaps(edges: &mut [(usize, usize)], attempts: usize, rng: &mut impl Rng) -> usize {
    let m = edges.len();
    if m < 2 {
        return 0;
    }
    let mut present: HashSet<(usize, usize)> = edges.iter().map(|&(a, b)| key(a, b)).collect();
    let mut accepted = 0;
    for _ in 0..attempts {
        let i = rng.random_range(0..m);
        let j = rng.random_range(0..m);
        if i == j {
            continue;
        }
        let (a, b) = edges[i];
        let (mut c, mut d) = edges[j];
        if rng.random::<bool>() {
            std::mem::swap(&mut c, &mut d);
        }
        // (a,b),(c,d) -> (a,d),(c,b)
        if a == d || c == b || present.contains(&key(a, d)) || present.contains(&key(c, b)) {
            continue;
        }
        present.remove(&key(a, b));
        present.remove(&key(c, d));
        present.insert(key(a, d));
        present.insert(key(c, b));
        edges[i] = (a, d);
        edges[j] = (c, b);
        accepted += 1;
    }
    accepted
}

pub(crate) fn rewire_topology(t: &Topology, seed: u64, swaps_per_edge: usize) -> Topology {
    let mut edges = t.undirected_edges();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attempts = swaps_per_edge * edges.len();
    double_edge_swaps(&mut edges, attempts, &mut rng);
    Topology::from_undirected(t.venues().to_vec(), &edges)
}

/// Degree-preserving null model of the undirected projection.
///
/// Performs `swaps_per_edge × |E|` double-edge swap attempts. The result is an
/// undirected graph carried as a `PlaceGraph` with one unit-weight edge per
/// undirected link, oriented from the smaller to the larger venue; its
/// projection has exactly the original degree sequence.
pub fn rewire_null_model(graph: &PlaceGraph, seed: u64, swaps_per_edge: usize) -> PlaceGraph {
    let t = graph.topology();
    let r = rewire_topology(&t, seed, swaps_per_edge);
    PlaceGraph::from_weighted_edges(
        graph.window(),
        r.undirected_edges()
            .into_iter()
            .map(|(a, b)| (r.venue(a), r.venue(b), 1)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degree_multiset(g: &PlaceGraph) -> Vec<usize> {
        let t = g.topology();
        let mut d: Vec<usize> = (0..t.len()).map(|i| t.degree(i)).collect();
        d.sort_unstable();
        d
    }

    #[test]
    fn preserves_degrees_and_counts() {
        let g = PlaceGraph::from_pairs(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (5, 1), (5, 3), (6, 4), (6, 2)]);
        let r = rewire_null_model(&g, 7, 10);
        assert_eq!(degree_multiset(&g), degree_multiset(&r));
        assert_eq!(g.node_count(), r.node_count());
        assert_eq!(g.topology().undirected_edge_count(), r.edge_count());
    }

    #[test]
    fn triangle_has_no_legal_swap() {
        let g = PlaceGraph::from_pairs(&[(0, 1), (1, 2), (2, 0)]);
        let mut edges = g.topology().undirected_edges();
        let before = edges.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(double_edge_swaps(&mut edges, 1000, &mut rng), 0);
        assert_eq!(edges, before);
    }

    #[test]
    fn deterministic_per_seed() {
        let g = PlaceGraph::from_pairs(&[(0, 1), (2, 3), (4, 5), (6, 7), (1, 2), (5, 6)]);
        assert_eq!(rewire_null_model(&g, 3, 10), rewire_null_model(&g, 3, 10));
    }
}
