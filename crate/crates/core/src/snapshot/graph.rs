use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::ingest::VenueIx;

/// Half-open time window `[start, end)` in epoch seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Window {
    pub start: i64,
    pub end: i64,
}

impl Window {
    pub fn new(start: i64, end: i64) -> Self {
        Window { start, end }
    }

    pub fn contains(&self, ts: i64) -> bool {
        ts >= self.start && ts < self.end
    }

    pub fn length(&self) -> i64 {
        self.end - self.start
    }
}

/// Directed weighted place network for one window.
///
/// Nodes are exactly the venues incident to at least one edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceGraph {
    window: Window,
    nodes: BTreeSet<VenueIx>,
    edges: BTreeMap<(VenueIx, VenueIx), u64>,
}

impl PlaceGraph {
    pub fn empty(window: Window) -> Self {
        PlaceGraph {
            window,
            nodes: BTreeSet::new(),
            edges: BTreeMap::new(),
        }
    }

    /// Builds a graph by accumulating `(origin, dest, weight)` triples.
    /// Self-loops and zero weights are ignored.
    pub fn from_weighted_edges<I>(window: Window, edges: I) -> Self
    where
        I: IntoIterator<Item = (VenueIx, VenueIx, u64)>,
    {
        let mut g = PlaceGraph::empty(window);
        for (o, d, w) in edges {
            g.add_weight(o, d, w);
        }
        g
    }

    /// Convenience for tests and fixtures: unit-weight edges over raw indices.
    pub fn from_pairs(pairs: &[(u32, u32)]) -> Self {
        PlaceGraph::from_weighted_edges(
            Window::new(0, 1),
            pairs.iter().map(|&(a, b)| (VenueIx(a), VenueIx(b), 1)),
        )
    }

    pub(crate) fn add_weight(&mut self, origin: VenueIx, dest: VenueIx, weight: u64) {
        if origin == dest || weight == 0 {
            return;
        }
        *self.edges.entry((origin, dest)).or_insert(0) += weight;
        self.nodes.insert(origin);
        self.nodes.insert(dest);
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn nodes(&self) -> &BTreeSet<VenueIx> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeMap<(VenueIx, VenueIx), u64> {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains_node(&self, v: VenueIx) -> bool {
        self.nodes.contains(&v)
    }

    pub fn weight(&self, origin: VenueIx, dest: VenueIx) -> u64 {
        self.edges.get(&(origin, dest)).copied().unwrap_or(0)
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Weighted out-degree (out-strength) of every node.
    pub fn out_strength(&self) -> BTreeMap<VenueIx, u64> {
        let mut m: BTreeMap<VenueIx, u64> = self.nodes.iter().map(|&v| (v, 0)).collect();
        for (&(o, _), &w) in &self.edges {
            *m.get_mut(&o).unwrap() += w;
        }
        m
    }

    /// Weighted in-degree (in-strength) of every node.
    pub fn in_strength(&self) -> BTreeMap<VenueIx, u64> {
        let mut m: BTreeMap<VenueIx, u64> = self.nodes.iter().map(|&v| (v, 0)).collect();
        for (&(_, d), &w) in &self.edges {
            *m.get_mut(&d).unwrap() += w;
        }
        m
    }

    /// Dense adjacency views used by the statistics and predictors.
    pub fn topology(&self) -> Topology {
        Topology::new(self)
    }
}

/// Compact index over a [`PlaceGraph`]: nodes are renumbered `0..n` in venue
/// order, with sorted neighbor lists for the undirected projection and the
/// directed out/in neighborhoods.
#[derive(Debug, Clone)]
pub struct Topology {
    venues: Vec<VenueIx>,
    pos: HashMap<VenueIx, usize>,
    undirected: Vec<Vec<usize>>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl Topology {
    fn new(g: &PlaceGraph) -> Self {
        let venues: Vec<VenueIx> = g.nodes.iter().copied().collect();
        let pos: HashMap<VenueIx, usize> = venues.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = venues.len();
        let mut undirected = vec![Vec::new(); n];
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for &(o, d) in g.edges.keys() {
            let (a, b) = (pos[&o], pos[&d]);
            out[a].push(b);
            inc[b].push(a);
            undirected[a].push(b);
            undirected[b].push(a);
        }
        for list in undirected.iter_mut().chain(out.iter_mut()).chain(inc.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        Topology {
            venues,
            pos,
            undirected,
            out,
            inc,
        }
    }

    /// Undirected topology from an explicit edge list over `0..n`.
    pub fn from_undirected(venues: Vec<VenueIx>, edges: &[(usize, usize)]) -> Self {
        let n = venues.len();
        let pos = venues.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut undirected = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a != b {
                undirected[a].push(b);
                undirected[b].push(a);
            }
        }
        for list in undirected.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        Topology {
            venues,
            pos,
            out: undirected.clone(),
            inc: undirected.clone(),
            undirected,
        }
    }

    pub fn len(&self) -> usize {
        self.venues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.venues.is_empty()
    }

    pub fn venue(&self, i: usize) -> VenueIx {
        self.venues[i]
    }

    pub fn venues(&self) -> &[VenueIx] {
        &self.venues
    }

    pub fn position(&self, v: VenueIx) -> Option<usize> {
        self.pos.get(&v).copied()
    }

    /// Undirected neighborhood Γ, sorted.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.undirected[i]
    }

    /// Out-neighborhood Γ⁺, sorted.
    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out[i]
    }

    /// In-neighborhood Γ⁻, sorted.
    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        &self.inc[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.undirected[i].len()
    }

    pub fn undirected_edge_count(&self) -> usize {
        self.undirected.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Undirected edges as `(a, b)` with `a < b`.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::with_capacity(self.undirected_edge_count());
        for (a, nbrs) in self.undirected.iter().enumerate() {
            for &b in nbrs {
                if a < b {
                    e.push((a, b));
                }
            }
        }
        e
    }
}

/// Size of the intersection of two sorted slices.
pub(crate) fn sorted_intersection_count(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}
