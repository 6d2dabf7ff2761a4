//! Weighted PageRank by power iteration.

use std::collections::BTreeMap;

use super::NetStatsError;
use crate::ingest::VenueIx;
use crate::snapshot::PlaceGraph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankOptions {
    pub damping: f64,
    /// L1 change between iterates below which iteration stops.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankOptions {
    fn default() -> Self {
        PageRankOptions {
            damping: 0.85,
            tol: 1e-9,
            max_iter: 100,
        }
    }
}

/// PageRank over transition weights. Rank leaves a node in proportion to
/// its out-edge weights; dangling nodes spread theirs uniformly.
pub fn pagerank(graph: &PlaceGraph, opts: PageRankOptions) -> Result<BTreeMap<VenueIx, f64>, NetStatsError> {
    if graph.is_empty() {
        return Err(NetStatsError::EmptyGraph);
    }
    let t = graph.topology();
    let n = t.len();
    let nf = n as f64;

    // (dest, weight) lists per source
    let mut out: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut strength = vec![0.0; n];
    for (&(o, d), &w) in graph.edges() {
        let (a, b) = (t.position(o).unwrap(), t.position(d).unwrap());
        out[a].push((b, w as f64));
        strength[a] += w as f64;
    }

    let d = opts.damping;
    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let dangling: f64 = (0..n).filter(|&i| strength[i] == 0.0).map(|i| rank[i]).sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        next.fill(base);
        for (i, edges) in out.iter().enumerate() {
            if edges.is_empty() {
                continue;
            }
            let share = d * rank[i] / strength[i];
            for &(j, w) in edges {
                next[j] += share * w;
            }
        }
        residual = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if residual < opts.tol {
            return Ok(t.venues().iter().copied().zip(rank).collect());
        }
    }
    Err(NetStatsError::NotConverged {
        iterations: opts.max_iter,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycle_is_uniform() {
        let pr = pagerank(&PlaceGraph::from_pairs(&[(0, 1), (1, 0)]), PageRankOptions::default()).unwrap();
        assert!((pr[&VenueIx(0)] - 0.5).abs() < 1e-12);
        assert!((pr[&VenueIx(1)] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn three_cycle_is_uniform() {
        let pr = pagerank(&PlaceGraph::from_pairs(&[(0, 1), (1, 2), (2, 0)]), PageRankOptions::default()).unwrap();
        for v in pr.values() {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    /// Dense power iteration over the full Google matrix, no shared code.
    fn dense_power_iteration(n: usize, edges: &[(usize, usize, f64)], d: f64, iters: usize) -> Vec<f64> {
        let mut m = vec![vec![0.0; n]; n];
        for &(a, b, w) in edges {
            m[a][b] += w;
        }
        for row in m.iter_mut() {
            let s: f64 = row.iter().sum();
            if s == 0.0 {
                row.iter_mut().for_each(|x| *x = 1.0 / n as f64);
            } else {
                row.iter_mut().for_each(|x| *x /= s);
            }
        }
        let mut r = vec![1.0 / n as f64; n];
        for _ in 0..iters {
            r = (0..n)
                .map(|j| (1.0 - d) / n as f64 + d * (0..n).map(|i| r[i] * m[i][j]).sum::<f64>())
                .collect();
        }
        r
    }

    #[test]
    fn chain_matches_dense_oracle() {
        let pr = pagerank(&PlaceGraph::from_pairs(&[(0, 1), (1, 2)]), PageRankOptions::default()).unwrap();
        let oracle = dense_power_iteration(3, &[(0, 1, 1.0), (1, 2, 1.0)], 0.85, 500);
        for i in 0..3 {
            assert!((pr[&VenueIx(i as u32)] - oracle[i]).abs() < 1e-8);
        }
        assert!((pr.values().sum::<f64>() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn weights_shift_rank() {
        let g = PlaceGraph::from_weighted_edges(
            crate::snapshot::Window::new(0, 1),
            [(VenueIx(0), VenueIx(1), 9), (VenueIx(0), VenueIx(2), 1), (VenueIx(1), VenueIx(0), 1), (VenueIx(2), VenueIx(0), 1)],
        );
        // bipartite, so the iterate contracts only at rate 0.85
        let opts = PageRankOptions { max_iter: 300, ..Default::default() };
        let pr = pagerank(&g, opts).unwrap();
        assert!(pr[&VenueIx(1)] > pr[&VenueIx(2)]);
    }

    #[test]
    fn non_convergence_reports_residual() {
        let opts = PageRankOptions { max_iter: 1, ..Default::default() };
        let err = pagerank(&PlaceGraph::from_pairs(&[(0, 1), (1, 2)]), opts).unwrap_err();
        assert!(matches!(err, NetStatsError::NotConverged { iterations: 1, residual } if residual > 0.0));
    }
}
