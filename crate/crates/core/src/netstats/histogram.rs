use std::collections::BTreeMap;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::NetStatsError;
use crate::snapshot::PlaceGraph;

/// Exact integer histogram `value -> count`, serialized as `[[value, count], ...]`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Histogram(pub BTreeMap<u64, u64>);

impl Histogram {
    pub fn from_values<I: IntoIterator<Item = u64>>(values: I) -> Self {
        let mut m = BTreeMap::new();
        for v in values {
            *m.entry(v).or_insert(0) += 1;
        }
        Histogram(m)
    }

    pub fn add(&mut self, value: u64) {
        *self.0.entry(value).or_insert(0) += 1;
    }

    pub fn count(&self, value: u64) -> u64 {
        self.0.get(&value).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mean(&self) -> Option<f64> {
        let n = self.total();
        (n > 0).then(|| self.0.iter().map(|(&v, &c)| v as f64 * c as f64).sum::<f64>() / n as f64)
    }

    /// Expands back into the sample multiset, in ascending order.
    pub fn samples(&self) -> Vec<u64> {
        self.0
            .iter()
            .flat_map(|(&v, &c)| std::iter::repeat_n(v, c as usize))
            .collect()
    }
}

impl Serialize for Histogram {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for (v, c) in &self.0 {
            seq.serialize_element(&[v, c])?;
        }
        seq.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeDistributions {
    pub in_degree: Histogram,
    pub out_degree: Histogram,
    /// Undirected projection: each neighbor counted once regardless of direction.
    pub degree: Histogram,
    pub weight: Histogram,
}

pub fn degree_and_weight_distributions(graph: &PlaceGraph) -> Result<DegreeDistributions, NetStatsError> {
    if graph.is_empty() {
        return Err(NetStatsError::EmptyGraph);
    }
    let t = graph.topology();
    let n = t.len();
    Ok(DegreeDistributions {
        in_degree: Histogram::from_values((0..n).map(|i| t.in_neighbors(i).len() as u64)),
        out_degree: Histogram::from_values((0..n).map(|i| t.out_neighbors(i).len() as u64)),
        degree: Histogram::from_values((0..n).map(|i| t.degree(i) as u64)),
        weight: Histogram::from_values(graph.edges().values().copied()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::VenueIx;
    use crate::snapshot::Window;

    #[test]
    fn reciprocal_pair() {
        let g = PlaceGraph::from_weighted_edges(Window::new(0, 1), [(VenueIx(0), VenueIx(1), 3), (VenueIx(1), VenueIx(0), 1)]);
        let d = degree_and_weight_distributions(&g).unwrap();
        assert_eq!(d.degree, Histogram::from_values([1, 1]));
        assert_eq!(d.weight, Histogram::from_values([3, 1]));
        assert_eq!(d.in_degree.count(1), 2);
    }

    #[test]
    fn star_out_from_hub() {
        let g = PlaceGraph::from_pairs(&[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let d = degree_and_weight_distributions(&g).unwrap();
        assert_eq!(d.out_degree.count(4), 1);
        assert_eq!(d.out_degree.count(0), 4);
        assert_eq!(d.in_degree.count(1), 4);
        assert_eq!(d.in_degree.count(0), 1);
    }

    #[test]
    fn empty_graph_rejected() {
        assert_eq!(
            degree_and_weight_distributions(&PlaceGraph::from_pairs(&[])),
            Err(NetStatsError::EmptyGraph)
        );
    }

    #[test]
    fn serializes_as_pairs() {
        let h = Histogram::from_values([3, 1, 3]);
        assert_eq!(serde_json::to_string(&h).unwrap(), "[[1,1],[3,2]]");
        assert_eq!(h.samples(), vec![1, 3, 3]);
    }
}
