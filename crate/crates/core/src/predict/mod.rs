//! Pair scores for link prediction: triadic, centrality, mobility and
//! gravity predictors, plus a logistic-regression baseline.
//!
//! Triadic neighborhoods are taken on the undirected projection. Pairs are
//! ordered: `(i, j)` predicts an edge from `i` to `j`.

mod logistic;

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use thiserror::Error;

pub use logistic::{score_logistic, train_logistic, LogisticModel, DEFAULT_L2, GRAD_TOL, MAX_EPOCHS};

use crate::geo::floored_distance_km;
use crate::ingest::{VenueIx, VenueRegistry};
use crate::snapshot::{ActivityProfile, PlaceGraph, Topology};

#[derive(Debug, Error, PartialEq)]
pub enum PredictError {
    #[error("pair endpoints must differ (venue {0:?})")]
    SamePair(VenueIx),
    #[error("no PageRank score for venue {0:?}")]
    MissingPageRank(VenueIx),
    #[error("no activity profile for venue {0:?}")]
    MissingProfile(VenueIx),
    #[error("venue {0:?} is not in the registry")]
    UnknownVenue(VenueIx),
    #[error("expected length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("profiles have {got} slots, expected {expected}")]
    ResolutionMismatch { expected: usize, got: usize },
    #[error("training labels contain a single class")]
    SingleClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Triadic {
    pub common_neighbors: f64,
    pub neighbor_overlap: f64,
    /// Adamic–Adar with the constant `+1.0` term.
    pub adamic_adar: f64,
}

const NO_NEIGHBORS: &[usize] = &[];

fn neighbors(t: &Topology, v: VenueIx) -> &[usize] {
    t.position(v).map_or(NO_NEIGHBORS, |p| t.neighbors(p))
}

/// Common neighbors, Jaccard overlap and extended Adamic–Adar
/// `1 + Σ_z 1/ln|Γ_z|` (natural log). Venues absent from the graph have no
/// neighbors.
pub fn triadic_scores(t: &Topology, i: VenueIx, j: VenueIx) -> Result<Triadic, PredictError> {
    if i == j {
        return Err(PredictError::SamePair(i));
    }
    let (a, b) = (neighbors(t, i), neighbors(t, j));
    let (mut x, mut y) = (0, 0);
    let mut common = 0usize;
    let mut aa = 1.0;
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                aa += 1.0 / (t.degree(a[x]) as f64).ln();
                x += 1;
                y += 1;
            }
        }
    }
    let union = a.len() + b.len() - common;
    Ok(Triadic {
        common_neighbors: common as f64,
        neighbor_overlap: if union == 0 { 0.0 } else { common as f64 / union as f64 },
        adamic_adar: aa,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Centrality {
    pub degree_product: f64,
    /// `|Γ_i^+|·|Γ_j^-|`.
    pub in_out_degree_product: f64,
    /// `rw(i)·rw(j)`.
    pub place_rank: f64,
}

/// Degree products and PageRank product. A venue absent from the graph
/// scores zero without needing a PageRank entry.
pub fn centrality_scores(
    t: &Topology,
    pagerank: &BTreeMap<VenueIx, f64>,
    i: VenueIx,
    j: VenueIx,
) -> Result<Centrality, PredictError> {
    let (pi, pj) = (t.position(i), t.position(j));
    let deg = |p: Option<usize>| p.map_or(0, |p| t.degree(p)) as f64;
    let out_i = pi.map_or(0, |p| t.out_neighbors(p).len()) as f64;
    let in_j = pj.map_or(0, |p| t.in_neighbors(p).len()) as f64;
    let rank = |v: VenueIx, p: Option<usize>| -> Result<f64, PredictError> {
        match p {
            None => Ok(0.0),
            Some(_) => pagerank.get(&v).copied().ok_or(PredictError::MissingPageRank(v)),
        }
    };
    Ok(Centrality {
        degree_product: deg(pi) * deg(pj),
        in_out_degree_product: out_i * in_j,
        place_rank: rank(i, pi)? * rank(j, pj)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mobility {
    pub geo_distance_km: f64,
    pub popularity_product: f64,
    pub diurnal_sim: f64,
    pub weekly_sim: f64,
}

/// Cosine similarity; zero when either vector is all zeros.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    if aa == 0.0 || bb == 0.0 {
        0.0
    } else {
        (ab / (aa.sqrt() * bb.sqrt())).clamp(0.0, 1.0)
    }
}

pub fn venue_distance_km(registry: &VenueRegistry, i: VenueIx, j: VenueIx) -> Result<f64, PredictError> {
    let a = registry.get(i).ok_or(PredictError::UnknownVenue(i))?;
    let b = registry.get(j).ok_or(PredictError::UnknownVenue(j))?;
    Ok(floored_distance_km(a.lat, a.lon, b.lat, b.lon))
}

fn profile(profiles: &BTreeMap<VenueIx, ActivityProfile>, v: VenueIx, slots: usize) -> Result<&ActivityProfile, PredictError> {
    let p = profiles.get(&v).ok_or(PredictError::MissingProfile(v))?;
    if p.slots() != slots {
        return Err(PredictError::ResolutionMismatch {
            expected: slots,
            got: p.slots(),
        });
    }
    Ok(p)
}

/// Distance, popularity product and hour-of-day / hour-of-week cosines.
/// `daily` must hold 24-slot profiles and `weekly` 168-slot ones.
pub fn mobility_scores(
    daily: &BTreeMap<VenueIx, ActivityProfile>,
    weekly: &BTreeMap<VenueIx, ActivityProfile>,
    registry: &VenueRegistry,
    i: VenueIx,
    j: VenueIx,
) -> Result<Mobility, PredictError> {
    let (di, dj) = (profile(daily, i, 24)?, profile(daily, j, 24)?);
    let (wi, wj) = (profile(weekly, i, 168)?, profile(weekly, j, 168)?);
    Ok(Mobility {
        geo_distance_km: venue_distance_km(registry, i, j)?,
        popularity_product: di.popularity() * dj.popularity(),
        diurnal_sim: cosine(&di.checkins, &dj.checkins),
        weekly_sim: cosine(&wi.checkins, &wj.checkins),
    })
}

pub const DEFAULT_BETA: f64 = 1.0;

/// `c_i·c_j / d^β`.
pub fn gravity_score(popularity_product: f64, distance_km: f64, beta: f64) -> f64 {
    popularity_product / distance_km.powf(beta)
}

/// `a_ij · Σ_τ c_i(τ)^+ · c_j(τ)^- / d^β`.
pub fn dynamic_gravity_score(
    out_strength_i: &[f64],
    in_strength_j: &[f64],
    adamic_adar: f64,
    distance_km: f64,
    beta: f64,
) -> Result<f64, PredictError> {
    if out_strength_i.len() != in_strength_j.len() {
        return Err(PredictError::LengthMismatch {
            expected: out_strength_i.len(),
            got: in_strength_j.len(),
        });
    }
    let flow: f64 = out_strength_i.iter().zip(in_strength_j).map(|(a, b)| a * b).sum();
    Ok(adamic_adar * flow / distance_km.powf(beta))
}

/// Weight of the directed edge `(i, j)` in the previous snapshot, 0 if absent.
pub fn edge_weight_baseline(prev: &PlaceGraph, i: VenueIx, j: VenueIx) -> f64 {
    prev.weight(i, j) as f64
}

/// Every predictor score for one ordered pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairFeatures {
    pub common_neighbors: f64,
    pub neighbor_overlap: f64,
    pub adamic_adar: f64,
    pub degree_product: f64,
    pub in_out_degree_product: f64,
    pub place_rank: f64,
    pub geo_distance_km: f64,
    pub popularity_product: f64,
    pub diurnal_sim: f64,
    pub weekly_sim: f64,
    pub edge_weight_prev: f64,
    pub gravity: f64,
    pub dynamic_gravity: f64,
}

impl PairFeatures {
    pub const NAMES: [&'static str; 13] = [
        "common_neighbors",
        "neighbor_overlap",
        "adamic_adar",
        "degree_product",
        "in_out_degree_product",
        "place_rank",
        "geo_distance_km",
        "popularity_product",
        "diurnal_sim",
        "weekly_sim",
        "edge_weight_prev",
        "gravity",
        "dynamic_gravity",
    ];

    pub fn values(&self) -> [f64; 13] {
        [
            self.common_neighbors,
            self.neighbor_overlap,
            self.adamic_adar,
            self.degree_product,
            self.in_out_degree_product,
            self.place_rank,
            self.geo_distance_km,
            self.popularity_product,
            self.diurnal_sim,
            self.weekly_sim,
            self.edge_weight_prev,
            self.gravity,
            self.dynamic_gravity,
        ]
    }

    /// Inputs of the logistic model: the ten network and mobility features.
    pub fn model_inputs(&self) -> Vec<f64> {
        self.values()[..10].to_vec()
    }
}

/// Writes one CSV row per pair: `origin,dest`, the feature columns and,
/// when given, `label`.
pub fn write_features_csv<W: Write>(
    out: W,
    registry: &VenueRegistry,
    rows: &[((VenueIx, VenueIx), PairFeatures)],
    labels: Option<&[bool]>,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["origin", "dest"];
    header.extend(PairFeatures::NAMES);
    if labels.is_some() {
        header.push("label");
    }
    w.write_record(&header)?;
    for (k, ((i, j), f)) in rows.iter().enumerate() {
        let mut rec = vec![registry.id(*i).to_string(), registry.id(*j).to_string()];
        rec.extend(f.values().iter().map(|v| v.to_string()));
        if let Some(l) = labels {
            rec.push(u8::from(l[k]).to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Everything derived from a training snapshot that pair features need.
pub struct FeatureContext<'a> {
    pub graph: &'a PlaceGraph,
    pub topology: Topology,
    pub registry: &'a VenueRegistry,
    pub daily: &'a BTreeMap<VenueIx, ActivityProfile>,
    pub weekly: &'a BTreeMap<VenueIx, ActivityProfile>,
    pub pagerank: &'a BTreeMap<VenueIx, f64>,
    /// Resolution of the strength vectors used by dynamic gravity, 24 or 168.
    pub slots: usize,
    pub beta: f64,
}

impl<'a> FeatureContext<'a> {
    pub fn new(
        graph: &'a PlaceGraph,
        registry: &'a VenueRegistry,
        daily: &'a BTreeMap<VenueIx, ActivityProfile>,
        weekly: &'a BTreeMap<VenueIx, ActivityProfile>,
        pagerank: &'a BTreeMap<VenueIx, f64>,
        slots: usize,
        beta: f64,
    ) -> Self {
        FeatureContext {
            graph,
            topology: graph.topology(),
            registry,
            daily,
            weekly,
            pagerank,
            slots,
            beta,
        }
    }

    pub fn features(&self, i: VenueIx, j: VenueIx) -> Result<PairFeatures, PredictError> {
        let tri = triadic_scores(&self.topology, i, j)?;
        let cen = centrality_scores(&self.topology, self.pagerank, i, j)?;
        let mob = mobility_scores(self.daily, self.weekly, self.registry, i, j)?;
        let strengths = if self.slots == 24 { self.daily } else { self.weekly };
        let (pi, pj) = (profile(strengths, i, self.slots)?, profile(strengths, j, self.slots)?);
        let dynamic_gravity =
            dynamic_gravity_score(&pi.out_strength, &pj.in_strength, tri.adamic_adar, mob.geo_distance_km, self.beta)?;
        Ok(PairFeatures {
            common_neighbors: tri.common_neighbors,
            neighbor_overlap: tri.neighbor_overlap,
            adamic_adar: tri.adamic_adar,
            degree_product: cen.degree_product,
            in_out_degree_product: cen.in_out_degree_product,
            place_rank: cen.place_rank,
            geo_distance_km: mob.geo_distance_km,
            popularity_product: mob.popularity_product,
            diurnal_sim: mob.diurnal_sim,
            weekly_sim: mob.weekly_sim,
            edge_weight_prev: edge_weight_baseline(self.graph, i, j),
            gravity: gravity_score(mob.popularity_product, mob.geo_distance_km, self.beta),
            dynamic_gravity,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::read_registry;

    fn v(i: u32) -> VenueIx {
        VenueIx(i)
    }

    #[test]
    fn no_common_neighbors_floor() {
        let t = PlaceGraph::from_pairs(&[(0, 1), (2, 3)]).topology();
        let s = triadic_scores(&t, v(0), v(2)).unwrap();
        assert_eq!(s.common_neighbors, 0.0);
        assert_eq!(s.neighbor_overlap, 0.0);
        assert_eq!(s.adamic_adar, 1.0);
    }

    #[test]
    fn single_degree_two_common_neighbor() {
        let t = PlaceGraph::from_pairs(&[(0, 2), (1, 2)]).topology();
        let s = triadic_scores(&t, v(0), v(1)).unwrap();
        assert!((s.adamic_adar - (1.0 / 2f64.ln() + 1.0)).abs() < 1e-12);
        assert!((s.adamic_adar - 2.4427).abs() < 1e-4);
        assert_eq!(s.neighbor_overlap, 1.0);
        assert_eq!(triadic_scores(&t, v(0), v(0)), Err(PredictError::SamePair(v(0))));
    }

    #[test]
    fn in_out_product_is_directed() {
        // 0 -> {1,2,3}; {4,5} -> 6
        let g = PlaceGraph::from_pairs(&[(0, 1), (0, 2), (0, 3), (4, 6), (5, 6)]);
        let t = g.topology();
        let pr: BTreeMap<_, _> = g.nodes().iter().map(|&n| (n, 0.1)).collect();
        let c = centrality_scores(&t, &pr, v(0), v(6)).unwrap();
        assert_eq!(c.in_out_degree_product, 6.0);
        assert_eq!(centrality_scores(&t, &pr, v(6), v(0)).unwrap().in_out_degree_product, 0.0);
        assert_eq!(c.degree_product, centrality_scores(&t, &pr, v(6), v(0)).unwrap().degree_product);
    }

    #[test]
    fn isolated_venue_centrality() {
        let g = PlaceGraph::from_pairs(&[(0, 1)]);
        let pr: BTreeMap<_, _> = g.nodes().iter().map(|&n| (n, 0.5)).collect();
        let c = centrality_scores(&g.topology(), &pr, v(9), v(1)).unwrap();
        assert_eq!((c.degree_product, c.in_out_degree_product, c.place_rank), (0.0, 0.0, 0.0));
        let missing = BTreeMap::new();
        assert_eq!(
            centrality_scores(&g.topology(), &missing, v(0), v(1)),
            Err(PredictError::MissingPageRank(v(0)))
        );
    }

    #[test]
    fn cosines() {
        let a = [1.0, 0.0, 1.0, 0.0];
        let b = [0.0, 1.0, 0.0, 0.0];
        assert_eq!(cosine(&a, &b), 0.0);
        assert!((cosine(&a, &a) - 1.0).abs() < 1e-15);
        assert_eq!(cosine(&a, &[0.0; 4]), 0.0);
    }

    #[test]
    fn gravity_formula() {
        assert_eq!(gravity_score(200.0, 2.0, 1.0), 100.0);
        assert_eq!(gravity_score(0.0, 2.0, 1.0), 0.0);
        assert_eq!(gravity_score(200.0, 3.7, 0.0), 200.0);
    }

    #[test]
    fn dynamic_gravity_formula() {
        assert_eq!(dynamic_gravity_score(&[2.0, 0.0], &[3.0, 1.0], 2.0, 1.0, 1.0).unwrap(), 12.0);
        let mut a = vec![0.0; 24];
        let mut b = vec![0.0; 24];
        a[9] = 4.0;
        b[20] = 7.0;
        assert_eq!(dynamic_gravity_score(&a, &b, 5.0, 1.0, 1.0).unwrap(), 0.0);
        assert!(dynamic_gravity_score(&a, &b[..3], 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn dynamic_gravity_degenerates_to_gravity() {
        let (ci, cj, d) = (13.0, 29.0, 3.3);
        let dg = dynamic_gravity_score(&[ci], &[cj], 1.0, d, 1.0).unwrap();
        assert_eq!(dg, gravity_score(ci * cj, d, 1.0));
    }

    #[test]
    fn edge_weight_is_directed() {
        let g = PlaceGraph::from_weighted_edges(crate::snapshot::Window::new(0, 1), [(v(0), v(1), 7)]);
        assert_eq!(edge_weight_baseline(&g, v(0), v(1)), 7.0);
        assert_eq!(edge_weight_baseline(&g, v(1), v(0)), 0.0);
        assert_eq!(edge_weight_baseline(&g, v(0), v(2)), 0.0);
    }

    #[test]
    fn london_paris() {
        let reg = read_registry("venue_id,lat,lon,category\nbb,51.5007,-0.1246,travel\net,48.8584,2.2945,travel\n".as_bytes())
            .unwrap();
        let d = venue_distance_km(&reg, v(0), v(1)).unwrap();
        // reference haversine evaluated separately with R = 6371.0088 km
        assert!((d - 340.539_390).abs() < 1e-4, "{d}");
    }
}
