//! Candidate generation, rank-sum AUC and temporal cross-validation.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ingest::{CheckinStream, VenueIx, VenueRegistry};
use crate::netstats::{pagerank, NetStatsError, PageRankOptions};
use crate::predict::{score_logistic, train_logistic, FeatureContext, PairFeatures, PredictError, DEFAULT_BETA, DEFAULT_L2};
use crate::snapshot::{activity_profiles, ActivityProfile, PlaceGraph, SnapshotError, Transition, Window};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no positive pairs: no test edge has both endpoints in the training snapshot")]
    NoPositives,
    #[error("AUC needs both classes (positives {positives}, negatives {negatives})")]
    SingleClass { positives: usize, negatives: usize },
    #[error("{scores} scores for {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("temporal cross-validation needs at least 2 snapshots, got {0}")]
    TooFewSnapshots(usize),
    #[error("snapshot {index}: {source}")]
    Stats { index: usize, source: NetStatsError },
    #[error(transparent)]
    Predict(#[from] PredictError),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
}

/// Largest training snapshot for which every ordered pair is enumerated.
pub const FULL_MODE_LIMIT: usize = 2000;
pub const DEFAULT_NEGATIVE_RATIO: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateMode {
    Full,
    Sampled,
}

impl fmt::Display for CandidateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateMode::Full => "full",
            CandidateMode::Sampled => "sampled",
        })
    }
}

impl FromStr for CandidateMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(CandidateMode::Full),
            "sampled" => Ok(CandidateMode::Sampled),
            _ => Err(format!("unknown candidate mode `{s}` (expected full or sampled)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CandidateOptions {
    pub mode: CandidateMode,
    pub negative_ratio: usize,
    pub seed: u64,
    pub new_edges_only: bool,
}

impl Default for CandidateOptions {
    fn default() -> Self {
        CandidateOptions {
            mode: CandidateMode::Sampled,
            negative_ratio: DEFAULT_NEGATIVE_RATIO,
            seed: 0,
            new_edges_only: false,
        }
    }
}

/// Labeled ordered pairs over the training snapshot's nodes, sorted by pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub pairs: Vec<(VenueIx, VenueIx)>,
    pub labels: Vec<bool>,
    pub requested_mode: CandidateMode,
    /// Mode actually used; full falls back to sampled above the size limit.
    pub mode: CandidateMode,
    pub negative_ratio: usize,
    pub seed: u64,
    pub new_edges_only: bool,
}

impl CandidateSet {
    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn negatives(&self) -> usize {
        self.labels.len() - self.positives()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Positives are test edges with both endpoints among the training nodes;
/// with `new_edges_only`, training edges are dropped from the candidate
/// universe altogether so they are neither positive nor negative.
/// Negatives are every other ordered pair (full mode) or a uniform sample of
/// `negative_ratio × positives` of them.
pub fn generate_candidates(train: &PlaceGraph, test: &PlaceGraph, opts: &CandidateOptions) -> Result<CandidateSet, EvalError> {
    let nodes: Vec<VenueIx> = train.nodes().iter().copied().collect();
    let excluded = |e: &(VenueIx, VenueIx)| opts.new_edges_only && train.edges().contains_key(e);
    let positives: BTreeSet<(VenueIx, VenueIx)> = test
        .edges()
        .keys()
        .filter(|(o, d)| train.contains_node(*o) && train.contains_node(*d))
        .filter(|e| !excluded(e))
        .copied()
        .collect();
    if positives.is_empty() {
        return Err(EvalError::NoPositives);
    }
    let n = nodes.len();
    let universe = n * (n - 1) - if opts.new_edges_only { train.edge_count() } else { 0 };
    let available = universe - positives.len();
    let mode = if opts.mode == CandidateMode::Full && n <= FULL_MODE_LIMIT {
        CandidateMode::Full
    } else {
        CandidateMode::Sampled
    };
    let want = match mode {
        CandidateMode::Full => available,
        CandidateMode::Sampled => (opts.negative_ratio * positives.len()).min(available),
    };

    let is_negative = |e: &(VenueIx, VenueIx)| e.0 != e.1 && !positives.contains(e) && !excluded(e);
    let all_negatives = || -> Vec<(VenueIx, VenueIx)> {
        nodes
            .iter()
            .flat_map(|&a| nodes.iter().map(move |&b| (a, b)))
            .filter(|e| is_negative(e))
            .collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let negatives: Vec<(VenueIx, VenueIx)> = if want == available {
        all_negatives()
    } else if want * 2 > available {
        let mut all = all_negatives();
        all.partial_shuffle(&mut rng, want);
        all.truncate(want);
        all
    } else {
        let mut chosen = HashSet::with_capacity(want);
        let mut out = Vec::with_capacity(want);
        while out.len() < want {
            let a = *nodes.choose(&mut rng).expect("nonempty");
            let b = nodes[rng.random_range(0..n)];
            let e = (a, b);
            if is_negative(&e) && chosen.insert(e) {
                out.push(e);
            }
        }
        out
    };

    let mut labeled: Vec<((VenueIx, VenueIx), bool)> =
        positives.into_iter().map(|e| (e, true)).chain(negatives.into_iter().map(|e| (e, false))).collect();
    labeled.sort_unstable();
    let (pairs, labels) = labeled.into_iter().unzip();
    Ok(CandidateSet {
        pairs,
        labels,
        requested_mode: opts.mode,
        mode,
        negative_ratio: opts.negative_ratio,
        seed: opts.seed,
        new_edges_only: opts.new_edges_only,
    })
}

/// Mann–Whitney AUC with midranks: the chance a random positive outscores a
/// random negative, ties counting one half.
///
/// The count is exact integer arithmetic; the result is rounded from the
/// side nearer zero so that `auc(s) + auc(-s)` is exactly 1.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64, EvalError> {
    if scores.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    let p = labels.iter().filter(|&&l| l).count();
    let n = labels.len() - p;
    if p == 0 || n == 0 {
        return Err(EvalError::SingleClass { positives: p, negatives: n });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // twice the Mann–Whitney U
    let mut u2: u128 = 0;
    let mut neg_below: u128 = 0;
    let mut k = 0;
    while k < order.len() {
        let mut end = k;
        let (mut pos_g, mut neg_g) = (0u128, 0u128);
        while end < order.len() && scores[order[end]].total_cmp(&scores[order[k]]).is_eq() {
            if labels[order[end]] {
                pos_g += 1;
            } else {
                neg_g += 1;
            }
            end += 1;
        }
        u2 += pos_g * (2 * neg_below + neg_g);
        neg_below += neg_g;
        k = end;
    }
    let denom = 2 * p as u128 * n as u128;
    let rest = denom - u2;
    Ok(if u2 <= rest {
        u2 as f64 / denom as f64
    } else {
        1.0 - rest as f64 / denom as f64
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Predictor {
    CommonNeighbors,
    NeighborOverlap,
    AdamicAdar,
    DegreeProduct,
    InOutDegreeProduct,
    PlaceRank,
    GeoDistance,
    Popularity,
    DiurnalSim,
    WeeklySim,
    EdgeWeight,
    Gravity,
    DynamicGravity,
    LogisticReg,
    Random,
}

impl Predictor {
    pub const ALL: [Predictor; 15] = [
        Predictor::CommonNeighbors,
        Predictor::NeighborOverlap,
        Predictor::AdamicAdar,
        Predictor::DegreeProduct,
        Predictor::InOutDegreeProduct,
        Predictor::PlaceRank,
        Predictor::GeoDistance,
        Predictor::Popularity,
        Predictor::DiurnalSim,
        Predictor::WeeklySim,
        Predictor::EdgeWeight,
        Predictor::Gravity,
        Predictor::DynamicGravity,
        Predictor::LogisticReg,
        Predictor::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Predictor::CommonNeighbors => "CommonNeighbors",
            Predictor::NeighborOverlap => "NeighborOverlap",
            Predictor::AdamicAdar => "AdamicAdar",
            Predictor::DegreeProduct => "DegreeProduct",
            Predictor::InOutDegreeProduct => "InOutDegreeProduct",
            Predictor::PlaceRank => "PlaceRank",
            Predictor::GeoDistance => "GeoDistance",
            Predictor::Popularity => "Popularity",
            Predictor::DiurnalSim => "DiurnalSim",
            Predictor::WeeklySim => "WeeklySim",
            Predictor::EdgeWeight => "EdgeWeight",
            Predictor::Gravity => "Gravity",
            Predictor::DynamicGravity => "DynamicGravity",
            Predictor::LogisticReg => "LogisticReg",
            Predictor::Random => "Random",
        }
    }

    /// Ranking score read off a feature row; higher means more likely.
    /// `None` for the logistic model and the random control.
    pub fn score(self, f: &PairFeatures) -> Option<f64> {
        Some(match self {
            Predictor::CommonNeighbors => f.common_neighbors,
            Predictor::NeighborOverlap => f.neighbor_overlap,
            Predictor::AdamicAdar => f.adamic_adar,
            Predictor::DegreeProduct => f.degree_product,
            Predictor::InOutDegreeProduct => f.in_out_degree_product,
            Predictor::PlaceRank => f.place_rank,
            Predictor::GeoDistance => -f.geo_distance_km,
            Predictor::Popularity => f.popularity_product,
            Predictor::DiurnalSim => f.diurnal_sim,
            Predictor::WeeklySim => f.weekly_sim,
            Predictor::EdgeWeight => f.edge_weight_prev,
            Predictor::Gravity => f.gravity,
            Predictor::DynamicGravity => f.dynamic_gravity,
            Predictor::LogisticReg | Predictor::Random => return None,
        })
    }
}

impl FromStr for Predictor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Predictor::ALL
            .iter()
            .copied()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown predictor `{s}`"))
    }
}

/// Logistic training rows are subsampled uniformly to at most this many.
pub const MAX_TRAINING_ROWS: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalConfig {
    pub candidates: CandidateOptions,
    /// Resolution of the strength vectors in dynamic gravity (24 or 168).
    pub slots: usize,
    pub beta: f64,
    pub utc_offset: i64,
    pub l2_lambda: f64,
    #[serde(skip)]
    pub pagerank: PageRankOptions,
    pub predictors: Vec<Predictor>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            candidates: CandidateOptions::default(),
            slots: 168,
            beta: DEFAULT_BETA,
            utc_offset: 0,
            l2_lambda: DEFAULT_L2,
            pagerank: PageRankOptions::default(),
            predictors: Predictor::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateSummary {
    pub requested_mode: CandidateMode,
    pub mode: CandidateMode,
    pub negative_ratio: usize,
    pub seed: u64,
    pub new_edges_only: bool,
    pub positives: usize,
    pub negatives: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogisticSummary {
    pub training_rows: usize,
    pub epochs: usize,
    pub converged: bool,
    pub final_loss: f64,
    pub weights: Vec<f64>,
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub train_index: usize,
    pub train_window: Window,
    pub test_window: Window,
    pub candidates: CandidateSummary,
    /// AUC per predictor name; the logistic row is absent for the first pair.
    pub auc: BTreeMap<String, f64>,
    pub logistic: Option<LogisticSummary>,
}

/// One evaluated train/test pair with its scored candidates.
#[derive(Debug, Clone)]
pub struct PairEvaluation {
    pub report: EvalReport,
    pub candidates: CandidateSet,
    pub features: Vec<PairFeatures>,
    /// Score columns in report order (predictor, scores).
    pub scores: Vec<(Predictor, Vec<f64>)>,
}

struct SnapshotInputs {
    daily: BTreeMap<VenueIx, ActivityProfile>,
    weekly: BTreeMap<VenueIx, ActivityProfile>,
    pagerank: BTreeMap<VenueIx, f64>,
}

fn snapshot_inputs(
    stream: &CheckinStream,
    transitions: &[Transition],
    graph: &PlaceGraph,
    index: usize,
    config: &EvalConfig,
) -> Result<SnapshotInputs, EvalError> {
    Ok(SnapshotInputs {
        daily: activity_profiles(stream, transitions, graph, 24, config.utc_offset)?,
        weekly: activity_profiles(stream, transitions, graph, 168, config.utc_offset)?,
        pagerank: pagerank(graph, config.pagerank).map_err(|source| EvalError::Stats { index, source })?,
    })
}

fn pair_features(ctx: &FeatureContext<'_>, pairs: &[(VenueIx, VenueIx)]) -> Result<Vec<PairFeatures>, PredictError> {
    pairs.par_iter().map(|&(i, j)| ctx.features(i, j)).collect()
}

fn random_scores(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random::<f64>()).collect()
}

/// Seeded uniform subsample of row indices, kept in original order.
fn subsample(n: usize, max: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    if n > max {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        idx.partial_shuffle(&mut rng, max);
        idx.truncate(max);
        idx.sort_unstable();
    }
    idx
}

/// Trains on each pair `(t, t+1)` and tests against `t+1`'s edges, for every
/// adjacent pair of snapshots. The logistic model for pair `t` is fit on the
/// labeled candidates of pair `t - 1`, so the first pair has no logistic row.
pub fn temporal_cross_validation(
    stream: &CheckinStream,
    transitions: &[Transition],
    snapshots: &[PlaceGraph],
    registry: &VenueRegistry,
    config: &EvalConfig,
) -> Result<Vec<PairEvaluation>, EvalError> {
    if snapshots.len() < 2 {
        return Err(EvalError::TooFewSnapshots(snapshots.len()));
    }
    let wants = |p: Predictor| config.predictors.contains(&p);
    let mut out = Vec::new();
    let mut previous: Option<(Vec<PairFeatures>, Vec<bool>)> = None;
    let mut inputs = snapshot_inputs(stream, transitions, &snapshots[0], 0, config)?;
    for t in 0..snapshots.len() - 1 {
        let (train, test) = (&snapshots[t], &snapshots[t + 1]);
        let opts = CandidateOptions {
            seed: config.candidates.seed.wrapping_add(t as u64),
            ..config.candidates
        };
        let candidates = generate_candidates(train, test, &opts)?;
        let ctx = FeatureContext::new(
            train,
            registry,
            &inputs.daily,
            &inputs.weekly,
            &inputs.pagerank,
            config.slots,
            config.beta,
        );
        let features = pair_features(&ctx, &candidates.pairs)?;

        let mut scores = Vec::new();
        for &p in Predictor::ALL.iter().filter(|&&p| wants(p)) {
            if let Some(col) = match p {
                Predictor::Random => Some(random_scores(candidates.len(), opts.seed ^ 0x5eed)),
                Predictor::LogisticReg => None,
                _ => Some(features.iter().map(|f| p.score(f).expect("direct predictor")).collect()),
            } {
                scores.push((p, col));
            }
        }
        let mut logistic = None;
        if wants(Predictor::LogisticReg) {
            if let Some((prev_features, prev_labels)) = &previous {
                let keep = subsample(prev_features.len(), MAX_TRAINING_ROWS, opts.seed);
                let rows: Vec<Vec<f64>> = keep.iter().map(|&k| prev_features[k].model_inputs()).collect();
                let labels: Vec<bool> = keep.iter().map(|&k| prev_labels[k]).collect();
                let model = train_logistic(&rows, &labels, config.l2_lambda)?;
                let col = features
                    .iter()
                    .map(|f| score_logistic(&model, &f.model_inputs()))
                    .collect::<Result<Vec<f64>, _>>()?;
                scores.push((Predictor::LogisticReg, col));
                logistic = Some(LogisticSummary {
                    training_rows: rows.len(),
                    epochs: model.loss_history.len() - 1,
                    converged: model.converged,
                    final_loss: *model.loss_history.last().expect("initial loss recorded"),
                    weights: model.weights,
                    bias: model.bias,
                });
            }
        }
        scores.sort_by_key(|(p, _)| *p);

        let mut aucs = BTreeMap::new();
        for (p, col) in &scores {
            aucs.insert(p.name().to_string(), auc(col, &candidates.labels)?);
        }
        let report = EvalReport {
            train_index: t,
            train_window: train.window(),
            test_window: test.window(),
            candidates: CandidateSummary {
                requested_mode: candidates.requested_mode,
                mode: candidates.mode,
                negative_ratio: candidates.negative_ratio,
                seed: candidates.seed,
                new_edges_only: candidates.new_edges_only,
                positives: candidates.positives(),
                negatives: candidates.negatives(),
            },
            auc: aucs,
            logistic,
        };

        if t + 1 < snapshots.len() - 1 {
            inputs = snapshot_inputs(stream, transitions, test, t + 1, config)?;
            previous = Some((features.clone(), candidates.labels.clone()));
        }
        out.push(PairEvaluation {
            report,
            candidates,
            features,
            scores,
        });
    }
    Ok(out)
}

/// Per-pair scores as CSV: `origin,dest,label` then one column per predictor.
pub fn write_scores_csv<W: Write>(out: W, registry: &VenueRegistry, eval: &PairEvaluation) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["origin".to_string(), "dest".to_string(), "label".to_string()];
    header.extend(eval.scores.iter().map(|(p, _)| p.name().to_string()));
    w.write_record(&header)?;
    for (k, &(i, j)) in eval.candidates.pairs.iter().enumerate() {
        let mut rec = vec![
            registry.id(i).to_string(),
            registry.id(j).to_string(),
            u8::from(eval.candidates.labels[k]).to_string(),
        ];
        rec.extend(eval.scores.iter().map(|(_, col)| col[k].to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_auc(scores: &[f64], labels: &[bool]) -> f64 {
        let mut s = 0.0;
        let mut c = 0.0;
        for (a, &la) in scores.iter().zip(labels) {
            for (b, &lb) in scores.iter().zip(labels) {
                if la && !lb {
                    c += 1.0;
                    s += if a > b {
                        1.0
                    } else if a == b {
                        0.5
                    } else {
                        0.0
                    };
                }
            }
        }
        s / c
    }

    #[test]
    fn hand_examples() {
        assert_eq!(auc(&[0.9, 0.4, 0.5, 0.1], &[true, true, false, false]).unwrap(), 0.75);
        assert_eq!(auc(&[3.0, 2.0, 1.0], &[true, false, false]).unwrap(), 1.0);
        assert_eq!(auc(&[1.0; 6], &[true, false, true, false, false, true]).unwrap(), 0.5);
        assert!(matches!(auc(&[1.0], &[true]), Err(EvalError::SingleClass { .. })));
    }

    #[test]
    fn ties_match_brute_force() {
        let s = [1.0, 2.0, 2.0, 3.0, 1.0, 2.0, 0.0];
        let l = [true, false, true, true, false, false, true];
        assert_eq!(auc(&s, &l).unwrap(), brute_auc(&s, &l));
    }

    #[test]
    fn negation_complements() {
        let s = [0.3, 0.1, 0.7, 0.7, 0.2, 0.9, 0.4];
        let l = [true, false, true, false, false, true, false];
        let neg: Vec<f64> = s.iter().map(|x| -x).collect();
        assert_eq!(auc(&s, &l).unwrap() + auc(&neg, &l).unwrap(), 1.0);
    }

    fn v(i: u32) -> VenueIx {
        VenueIx(i)
    }

    #[test]
    fn full_mode_counts() {
        let train = PlaceGraph::from_pairs(&[(0, 1), (1, 2)]);
        let test = PlaceGraph::from_pairs(&[(0, 1)]);
        let opts = CandidateOptions {
            mode: CandidateMode::Full,
            ..Default::default()
        };
        let c = generate_candidates(&train, &test, &opts).unwrap();
        assert_eq!((c.positives(), c.negatives()), (1, 5));
        assert_eq!(c.mode, CandidateMode::Full);
    }

    #[test]
    fn positives_need_known_endpoints() {
        let train = PlaceGraph::from_pairs(&[(0, 1), (1, 2)]);
        let test = PlaceGraph::from_pairs(&[(0, 1), (2, 7)]);
        let c = generate_candidates(&train, &test, &CandidateOptions::default()).unwrap();
        assert_eq!(c.positives(), 1);
        assert!(!c.pairs.contains(&(v(2), v(7))));
        let none = PlaceGraph::from_pairs(&[(5, 7)]);
        assert!(matches!(generate_candidates(&train, &none, &CandidateOptions::default()), Err(EvalError::NoPositives)));
    }

    #[test]
    fn new_edges_only_drops_repeats() {
        let train = PlaceGraph::from_pairs(&[(0, 1), (1, 2)]);
        let test = PlaceGraph::from_pairs(&[(0, 1), (2, 0)]);
        let opts = CandidateOptions {
            mode: CandidateMode::Full,
            new_edges_only: true,
            ..Default::default()
        };
        let c = generate_candidates(&train, &test, &opts).unwrap();
        assert_eq!(c.positives(), 1);
        assert!(!c.pairs.contains(&(v(0), v(1))));
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn sampled_ratio_and_determinism() {
        let mut pairs = Vec::new();
        for a in 0..60u32 {
            pairs.push((a, (a + 1) % 60));
            pairs.push((a, (a + 7) % 60));
        }
        let train = PlaceGraph::from_pairs(&pairs);
        let test_pairs: Vec<(u32, u32)> = (0..50).map(|a| (a, (a + 3) % 60)).collect();
        let test = PlaceGraph::from_pairs(&test_pairs);
        let opts = CandidateOptions {
            seed: 9,
            ..Default::default()
        };
        let c = generate_candidates(&train, &test, &opts).unwrap();
        assert_eq!(c.positives(), 50);
        assert_eq!(c.negatives(), 500);
        assert_eq!(c, generate_candidates(&train, &test, &opts).unwrap());
        let uniq: HashSet<_> = c.pairs.iter().collect();
        assert_eq!(uniq.len(), c.len());
    }

    #[test]
    fn sampled_takes_all_when_short() {
        let train = PlaceGraph::from_pairs(&[(0, 1), (1, 2)]);
        let test = PlaceGraph::from_pairs(&[(0, 1)]);
        let c = generate_candidates(&train, &test, &CandidateOptions::default()).unwrap();
        assert_eq!(c.negatives(), 5);
    }
}
