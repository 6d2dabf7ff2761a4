//! Brute-force reference implementations shared by the integration tests.
//! Everything here works on plain adjacency data, not on library types.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;

/// Pairwise AUC: share of (positive, negative) pairs ranked correctly, ties
/// counting one half.
pub fn auc_pairwise(scores: &[f64], labels: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut total = 0.0;
    for (sp, _) in scores.iter().zip(labels).filter(|(_, &l)| l) {
        for (sn, _) in scores.iter().zip(labels).filter(|(_, &l)| !l) {
            total += 1.0;
            if sp > sn {
                wins += 1.0;
            } else if sp == sn {
                wins += 0.5;
            }
        }
    }
    wins / total
}

/// Undirected simple graph over nodes `0..n` built from directed pairs.
pub struct Undirected {
    pub n: usize,
    pub adj: Vec<Vec<bool>>,
}

impl Undirected {
    /// Nodes are the distinct endpoints, relabelled in ascending order.
    pub fn from_pairs(pairs: &[(u32, u32)]) -> (Self, Vec<u32>) {
        let nodes: BTreeSet<u32> = pairs.iter().filter(|(a, b)| a != b).flat_map(|&(a, b)| [a, b]).collect();
        let ids: Vec<u32> = nodes.into_iter().collect();
        let pos: BTreeMap<u32, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = ids.len();
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in pairs {
            if a != b {
                let (i, j) = (pos[&a], pos[&b]);
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
        (Undirected { n, adj }, ids)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].iter().filter(|&&x| x).count()
    }

    /// Local clustering by enumerating neighbor pairs.
    pub fn local_clustering(&self) -> Vec<f64> {
        (0..self.n)
            .map(|u| {
                let nb: Vec<usize> = (0..self.n).filter(|&v| self.adj[u][v]).collect();
                let k = nb.len();
                if k < 2 {
                    return 0.0;
                }
                let mut links = 0;
                for x in 0..k {
                    for y in x + 1..k {
                        if self.adj[nb[x]][nb[y]] {
                            links += 1;
                        }
                    }
                }
                links as f64 / (k * (k - 1) / 2) as f64
            })
            .collect()
    }

    pub fn mean_clustering(&self) -> f64 {
        let c = self.local_clustering();
        c.iter().sum::<f64>() / c.len() as f64
    }

    /// Pearson correlation of end degrees over both orientations of every
    /// edge, two-pass. `None` when undefined.
    pub fn assortativity(&self) -> Option<f64> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.adj[i][j] {
                    xs.push(self.degree(i) as f64);
                    ys.push(self.degree(j) as f64);
                }
            }
        }
        if xs.is_empty() {
            return None;
        }
        let m = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / m;
        let my = ys.iter().sum::<f64>() / m;
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        if vx == 0.0 || vy == 0.0 {
            return None;
        }
        Some(cov / (vx * vy).sqrt())
    }

    /// Connected components via BFS, each sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![];
            let mut q = VecDeque::from([s]);
            comp[s] = id;
            while let Some(u) = q.pop_front() {
                members.push(u);
                for v in 0..self.n {
                    if self.adj[u][v] && comp[v] == usize::MAX {
                        comp[v] = id;
                        q.push_back(v);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Largest component, ties to the one holding the smallest node.
    pub fn giant(&self) -> Vec<usize> {
        let mut best = Vec::new();
        for c in self.components() {
            if c.len() > best.len() {
                best = c;
            }
        }
        best
    }

    /// All-pairs distances (Floyd-Warshall); `u64::MAX` when unreachable.
    pub fn distances(&self) -> Vec<Vec<u64>> {
        let inf = u64::MAX;
        let mut d = vec![vec![inf; self.n]; self.n];
        for i in 0..self.n {
            d[i][i] = 0;
            for j in 0..self.n {
                if self.adj[i][j] {
                    d[i][j] = 1;
                }
            }
        }
        for k in 0..self.n {
            for i in 0..self.n {
                for j in 0..self.n {
                    if d[i][k] != inf && d[k][j] != inf && d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        d
    }

    /// Mean distance over ordered distinct pairs of the giant component and
    /// its diameter.
    pub fn giant_paths(&self) -> (f64, u64) {
        let d = self.distances();
        let g = self.giant();
        let mut sum = 0u64;
        let mut count = 0u64;
        let mut diam = 0;
        for &i in &g {
            for &j in &g {
                if i != j {
                    sum += d[i][j];
                    count += 1;
                    diam = diam.max(d[i][j]);
                }
            }
        }
        let mean = if count == 0 { 0.0 } else { sum as f64 / count as f64 };
        (mean, diam)
    }
}

/// PageRank as the solution of the linear system
/// `(I - d·M) r = (1 - d)/n · 1`, where column `i` of `M` is node `i`'s
/// normalized out-weights, or uniform when it has none. Solved by Gaussian
/// elimination with partial pivoting. `weights[i][j]` is the weight of i→j.
pub fn pagerank_linear(weights: &[Vec<f64>], damping: f64) -> Vec<f64> {
    let n = weights.len();
    let nf = n as f64;
    let mut a = vec![vec![0.0; n + 1]; n];
    for i in 0..n {
        let s: f64 = weights[i].iter().sum();
        for j in 0..n {
            // contribution of r_i to row j
            let m = if s > 0.0 { weights[i][j] / s } else { 1.0 / nf };
            a[j][i] -= damping * m;
        }
    }
    for (j, row) in a.iter_mut().enumerate() {
        row[j] += 1.0;
        row[n] = (1.0 - damping) / nf;
    }
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(col, p);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    (0..n).map(|i| a[i][n] / a[i][i]).collect()
}

/// Discrete power law `P(k) ∝ k^-β` for `k ≥ 1`, sampled by inverse CDF over
/// an explicit table of the first `TABLE` probabilities, with a continuous
/// Pareto tail beyond it.
pub struct DiscretePowerLaw {
    cdf: Vec<f64>,
    beta: f64,
}

impl DiscretePowerLaw {
    const TABLE: usize = 200_000;

    pub fn new(beta: f64) -> Self {
        let weights: Vec<f64> = (1..=Self::TABLE).map(|k| (k as f64).powf(-beta)).collect();
        // mass beyond the table, midpoint-integral approximation
        let tail = (Self::TABLE as f64 + 0.5).powf(1.0 - beta) / (beta - 1.0);
        let z: f64 = weights.iter().rev().sum::<f64>() + tail;
        let mut acc = 0.0;
        let cdf = weights
            .iter()
            .map(|w| {
                acc += w / z;
                acc
            })
            .collect();
        DiscretePowerLaw { cdf, beta }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> u64 {
        let u: f64 = rng.random();
        let k = self.cdf.partition_point(|&c| c < u);
        if k < self.cdf.len() {
            return k as u64 + 1;
        }
        let last = *self.cdf.last().unwrap();
        let v = ((u - last) / (1.0 - last)).clamp(0.0, 1.0 - 1e-16);
        let x0 = Self::TABLE as f64 + 0.5;
        (x0 * (1.0 - v).powf(-1.0 / (self.beta - 1.0))).round() as u64
    }
}
