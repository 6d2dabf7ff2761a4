//! Growth and persistence of place networks across snapshots.
//!
//! Edge identity is the directed `(origin, dest)` pair; weights never affect
//! set membership. Probabilities are exact set-cardinality ratios, kept as
//! [`SetRatio`] so a zero denominator is an explicit undefined value.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::ingest::{CheckinStream, VenueIx};
use crate::snapshot::{extract_transitions, PlaceGraph, SECONDS_PER_DAY};

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("need {need} snapshots from base {base}, have {have}")]
    NotEnoughSnapshots { base: usize, need: usize, have: usize },
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("week index must be at least 2, got {0}")]
    BadWeek(usize),
    #[error("densification fit needs at least {need} points below the saturation cutoff, got {got}")]
    TooFewFitPoints { need: usize, got: usize },
    #[error("check-in stream is empty")]
    EmptyStream,
}

/// `numerator / denominator` over set cardinalities; undefined when the
/// denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetRatio {
    pub numerator: u64,
    pub denominator: u64,
}

impl SetRatio {
    pub fn new(numerator: u64, denominator: u64) -> Self {
        SetRatio { numerator, denominator }
    }

    pub fn value(&self) -> Option<f64> {
        (self.denominator > 0).then(|| self.numerator as f64 / self.denominator as f64)
    }

    pub fn is_defined(&self) -> bool {
        self.denominator > 0
    }

    /// Exact rational comparison against `num / den`.
    pub fn equals(&self, num: u64, den: u64) -> bool {
        self.numerator as u128 * den as u128 == num as u128 * self.denominator as u128 && self.is_defined() == (den > 0)
    }
}

impl Serialize for SetRatio {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SetRatio", 3)?;
        st.serialize_field("numerator", &self.numerator)?;
        st.serialize_field("denominator", &self.denominator)?;
        st.serialize_field("value", &self.value())?;
        st.end()
    }
}

fn edge_set(g: &PlaceGraph) -> BTreeSet<(VenueIx, VenueIx)> {
    g.edges().keys().copied().collect()
}

/// Share of next-snapshot edges absent from the previous one.
pub fn new_edge_probability(prev: &PlaceGraph, next: &PlaceGraph) -> SetRatio {
    let new = next.edges().keys().filter(|e| !prev.edges().contains_key(e)).count();
    SetRatio::new(new as u64, next.edge_count() as u64)
}

/// Share of `prev` edges with weight `>= w` that reappear in `next`.
pub fn weight_persistence(prev: &PlaceGraph, next: &PlaceGraph, w: u64) -> SetRatio {
    let (mut kept, mut total) = (0, 0);
    for (e, &weight) in prev.edges() {
        if weight >= w {
            total += 1;
            if next.edges().contains_key(e) {
                kept += 1;
            }
        }
    }
    SetRatio::new(kept, total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PersistenceKind {
    Edge,
    Node,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistenceSeries {
    pub kind: PersistenceKind,
    pub base: usize,
    /// Entry `n - 1` is the horizon-`n` probability.
    pub probabilities: Vec<SetRatio>,
}

fn check_range(snapshots: usize, base: usize, horizon: usize) -> Result<(), DynamicsError> {
    if horizon == 0 {
        return Err(DynamicsError::ZeroHorizon);
    }
    if base + horizon >= snapshots {
        return Err(DynamicsError::NotEnoughSnapshots {
            base,
            need: horizon + 1,
            have: snapshots.saturating_sub(base),
        });
    }
    Ok(())
}

/// Running-intersection share `|S^t ∩ ... ∩ S^{t+n}| / |S^t|` for n = 1..=horizon.
fn longevity<T: Ord + Clone>(sets: &[BTreeSet<T>], kind: PersistenceKind, base: usize) -> PersistenceSeries {
    let denom = sets[0].len() as u64;
    let mut running = sets[0].clone();
    let probabilities = sets[1..]
        .iter()
        .map(|s| {
            running.retain(|x| s.contains(x));
            SetRatio::new(running.len() as u64, denom)
        })
        .collect();
    PersistenceSeries {
        kind,
        base,
        probabilities,
    }
}

pub fn edge_longevity(snapshots: &[PlaceGraph], base: usize, horizon: usize) -> Result<PersistenceSeries, DynamicsError> {
    check_range(snapshots.len(), base, horizon)?;
    let sets: Vec<_> = snapshots[base..=base + horizon].iter().map(edge_set).collect();
    Ok(longevity(&sets, PersistenceKind::Edge, base))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeTurnover {
    /// New-node share in snapshot `base + 1`.
    pub new_node: SetRatio,
    pub longevity: PersistenceSeries,
}

pub fn node_turnover(snapshots: &[PlaceGraph], base: usize, horizon: usize) -> Result<NodeTurnover, DynamicsError> {
    check_range(snapshots.len(), base, horizon)?;
    let (prev, next) = (&snapshots[base], &snapshots[base + 1]);
    let new = next.nodes().difference(prev.nodes()).count();
    let sets: Vec<BTreeSet<VenueIx>> = snapshots[base..=base + horizon].iter().map(|g| g.nodes().clone()).collect();
    Ok(NodeTurnover {
        new_node: SetRatio::new(new as u64, next.node_count() as u64),
        longevity: longevity(&sets, PersistenceKind::Node, base),
    })
}

/// Venues first seen in week `week_index` (1-based from `t0`) over distinct
/// venues seen that week. "First seen" looks at the whole stream.
pub fn new_venue_fraction(stream: &CheckinStream, t0: i64, week_index: usize) -> Result<SetRatio, DynamicsError> {
    if week_index < 2 {
        return Err(DynamicsError::BadWeek(week_index));
    }
    let week = 7 * SECONDS_PER_DAY;
    let start = t0 + (week_index as i64 - 1) * week;
    let end = start + week;
    let mut seen_before = HashSet::new();
    let mut this_week = BTreeSet::new();
    for e in stream.events() {
        if e.timestamp < start {
            seen_before.insert(e.venue);
        } else if e.timestamp < end {
            this_week.insert(e.venue);
        }
    }
    let new = this_week.iter().filter(|v| !seen_before.contains(v)).count();
    Ok(SetRatio::new(new as u64, this_week.len() as u64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GrowthPoint {
    pub ts: i64,
    pub n_nodes: u64,
    pub n_edges: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensificationFit {
    pub alpha: f64,
    pub alpha_stderr: f64,
    pub fit_points: usize,
    /// Points with `n_nodes` below this were used.
    pub node_cutoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthCurve {
    pub points: Vec<GrowthPoint>,
    pub fit: DensificationFit,
}

impl GrowthCurve {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("ts,n_nodes,n_edges\n");
        for p in &self.points {
            let _ = writeln!(s, "{},{},{}", p.ts, p.n_nodes, p.n_edges);
        }
        s
    }
}

pub const SATURATION_CUTOFF: f64 = 0.95;
pub const MIN_FIT_POINTS: usize = 10;

/// Least-squares slope of `ln e` on `ln n` over the pre-saturation points
/// (`n < 0.95 × final n`).
pub fn fit_densification(points: &[(u64, u64)]) -> Result<DensificationFit, DynamicsError> {
    let final_n = points.iter().map(|p| p.0).max().unwrap_or(0) as f64;
    let cutoff = SATURATION_CUTOFF * final_n;
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(n, e)| (n as f64) < cutoff && n > 0 && e > 0)
        .map(|&(n, e)| ((n as f64).ln(), (e as f64).ln()))
        .collect();
    let m = xy.len();
    let too_few = DynamicsError::TooFewFitPoints {
        need: MIN_FIT_POINTS,
        got: m,
    };
    if m < MIN_FIT_POINTS {
        return Err(too_few);
    }
    let mf = m as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / mf;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / mf;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(too_few);
    }
    let alpha = sxy / sxx;
    let intercept = my - alpha * mx;
    let ssr: f64 = xy.iter().map(|p| (p.1 - intercept - alpha * p.0).powi(2)).sum();
    let alpha_stderr = if m > 2 { (ssr / (mf - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(DensificationFit {
        alpha,
        alpha_stderr,
        fit_points: m,
        node_cutoff: cutoff,
    })
}

/// Replays transitions from `t0` in time order, recording `(n(t), e(t))`
/// whenever a node or edge appears for the first time, and fits the
/// densification exponent.
pub fn growth_curve(stream: &CheckinStream, gap_threshold: i64, t0: i64) -> Result<GrowthCurve, DynamicsError> {
    if stream.is_empty() {
        return Err(DynamicsError::EmptyStream);
    }
    let mut transitions: Vec<_> = extract_transitions(stream, gap_threshold)
        .into_iter()
        .filter(|t| t.t_origin >= t0)
        .collect();
    transitions.sort_by(|a, b| {
        (a.t_origin, a.t_dest, a.origin, a.dest).cmp(&(b.t_origin, b.t_dest, b.origin, b.dest))
    });
    let mut nodes = HashSet::new();
    let mut edges = HashSet::new();
    let mut points = Vec::new();
    for t in &transitions {
        let mut grew = nodes.insert(t.origin);
        grew |= nodes.insert(t.dest);
        grew |= edges.insert((t.origin, t.dest));
        if grew {
            points.push(GrowthPoint {
                ts: t.t_origin,
                n_nodes: nodes.len() as u64,
                n_edges: edges.len() as u64,
            });
        }
    }
    let pairs: Vec<(u64, u64)> = points.iter().map(|p| (p.n_nodes, p.n_edges)).collect();
    let fit = fit_densification(&pairs)?;
    Ok(GrowthCurve { points, fit })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDynamics {
    pub base: usize,
    pub new_edge: SetRatio,
    pub new_node: SetRatio,
    /// `(w, P_e(w))` for w = 1..=10.
    pub weight_persistence: Vec<(u64, SetRatio)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotDynamics {
    pub pairs: Vec<PairDynamics>,
    pub edge_longevity: Vec<PersistenceSeries>,
    pub node_longevity: Vec<PersistenceSeries>,
}

/// Adjacent-pair probabilities and, from every base, longevity series
/// running to the last snapshot.
pub fn snapshot_dynamics(snapshots: &[PlaceGraph]) -> SnapshotDynamics {
    let k = snapshots.len();
    let mut out = SnapshotDynamics {
        pairs: Vec::new(),
        edge_longevity: Vec::new(),
        node_longevity: Vec::new(),
    };
    for base in 0..k.saturating_sub(1) {
        let (prev, next) = (&snapshots[base], &snapshots[base + 1]);
        let horizon = k - 1 - base;
        let nodes = node_turnover(snapshots, base, horizon).expect("range checked");
        out.pairs.push(PairDynamics {
            base,
            new_edge: new_edge_probability(prev, next),
            new_node: nodes.new_node,
            weight_persistence: (1..=10).map(|w| (w, weight_persistence(prev, next, w))).collect(),
        });
        out.edge_longevity.push(edge_longevity(snapshots, base, horizon).expect("range checked"));
        out.node_longevity.push(nodes.longevity);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::CheckinEvent;
    use crate::snapshot::Window;

    // a=0, b=1, c=2
    fn g(edges: &[(u32, u32, u64)]) -> PlaceGraph {
        PlaceGraph::from_weighted_edges(Window::new(0, 1), edges.iter().map(|&(a, b, w)| (VenueIx(a), VenueIx(b), w)))
    }

    #[test]
    fn new_edge_set_algebra() {
        let ab = g(&[(0, 1, 1)]);
        let ab_bc = g(&[(0, 1, 1), (1, 2, 1)]);
        assert!(new_edge_probability(&ab, &ab_bc).equals(1, 2));
        assert!(new_edge_probability(&ab_bc, &ab_bc).equals(0, 1));
        assert!(new_edge_probability(&g(&[(2, 0, 1)]), &ab_bc).equals(1, 1));
        assert_eq!(new_edge_probability(&ab, &g(&[])).value(), None);
    }

    #[test]
    fn new_edge_ignores_weight() {
        let a = g(&[(0, 1, 1), (1, 2, 9)]);
        let b = g(&[(0, 1, 5), (1, 2, 1)]);
        assert_eq!(new_edge_probability(&a, &b).numerator, 0);
    }

    #[test]
    fn longevity_series() {
        let s = [g(&[(0, 1, 1), (1, 2, 1)]), g(&[(0, 1, 1)]), g(&[(0, 1, 1)])];
        let l = edge_longevity(&s, 0, 2).unwrap();
        assert!(l.probabilities[0].equals(1, 2));
        assert!(l.probabilities[1].equals(1, 2));
        assert!(edge_longevity(&s, 1, 2).is_err());
        assert_eq!(edge_longevity(&s, 0, 0), Err(DynamicsError::ZeroHorizon));
    }

    #[test]
    fn weight_persistence_counts() {
        let t = g(&[(0, 1, 5), (1, 2, 1)]);
        let t1 = g(&[(0, 1, 1)]);
        assert!(weight_persistence(&t, &t1, 2).equals(1, 1));
        assert!(weight_persistence(&t, &t1, 1).equals(1, 2));
        assert_eq!(weight_persistence(&t, &t1, 6).value(), None);
    }

    #[test]
    fn node_turnover_set_algebra() {
        let s = [g(&[(0, 1, 1)]), g(&[(0, 2, 1)])];
        let n = node_turnover(&s, 0, 1).unwrap();
        assert!(n.new_node.equals(1, 2));
        assert!(n.longevity.probabilities[0].equals(1, 2));

        let same = [g(&[(0, 1, 1)]), g(&[(1, 0, 4)]), g(&[(0, 1, 2)])];
        let n = node_turnover(&same, 0, 2).unwrap();
        assert!(n.new_node.equals(0, 1));
        assert!(n.longevity.probabilities.iter().all(|p| p.equals(1, 1)));
    }

    fn ev(user: &str, venue: u32, ts: i64) -> CheckinEvent {
        CheckinEvent {
            user: user.into(),
            venue: VenueIx(venue),
            timestamp: ts,
        }
    }

    #[test]
    fn new_venue_fractions() {
        let w = 7 * SECONDS_PER_DAY;
        let mut events = vec![ev("u", 0, 10), ev("u", 1, 20)];
        // week 2: venue 0 again plus venue 2 -> 1 new of 2
        events.extend([ev("u", 0, w + 5), ev("u", 2, w + 50)]);
        // week 3: only venues already seen
        events.push(ev("u", 1, 2 * w + 1));
        let s = CheckinStream::from_events(events);
        assert!(new_venue_fraction(&s, 0, 2).unwrap().equals(1, 2));
        assert!(new_venue_fraction(&s, 0, 3).unwrap().equals(0, 1));
        assert_eq!(new_venue_fraction(&s, 0, 4).unwrap().value(), None);
        assert_eq!(new_venue_fraction(&s, 0, 1), Err(DynamicsError::BadWeek(1)));
    }

    #[test]
    fn all_new_venues() {
        let w = 7 * SECONDS_PER_DAY;
        let s = CheckinStream::from_events(vec![ev("u", 0, 1), ev("u", 1, w + 1), ev("u", 2, w + 2)]);
        assert!(new_venue_fraction(&s, 0, 2).unwrap().equals(1, 1));
    }

    #[test]
    fn linear_growth_has_unit_exponent() {
        let pts: Vec<(u64, u64)> = (2..500).map(|n| (n, 2 * n)).collect();
        let f = fit_densification(&pts).unwrap();
        assert!((f.alpha - 1.0).abs() < 1e-12);
    }

    #[test]
    fn planted_exponent() {
        let pts: Vec<(u64, u64)> = (2..2000u64).map(|n| (n, (n as f64).powf(1.2).round() as u64)).collect();
        let f = fit_densification(&pts).unwrap();
        assert!((f.alpha - 1.2).abs() < 0.03, "{}", f.alpha);
    }

    #[test]
    fn too_few_points() {
        let pts: Vec<(u64, u64)> = (2..8).map(|n| (n, n)).collect();
        assert!(matches!(fit_densification(&pts), Err(DynamicsError::TooFewFitPoints { .. })));
    }

    #[test]
    fn growth_points_are_monotone() {
        let h = 3600;
        let mut events = Vec::new();
        for u in 0..30u32 {
            for k in 0..4u32 {
                events.push(ev(&format!("u{u}"), (u * 3 + k * 7) % 40, 1000 + (u as i64) * 10 * h + k as i64 * h));
            }
        }
        let s = CheckinStream::from_events(events);
        let c = growth_curve(&s, 3 * h, 0).unwrap();
        for w in c.points.windows(2) {
            assert!(w[1].n_nodes >= w[0].n_nodes && w[1].n_edges >= w[0].n_edges);
        }
        assert!(c.to_csv().starts_with("ts,n_nodes,n_edges\n"));
    }
}
