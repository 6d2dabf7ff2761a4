//! Topological statistics of place graphs.
//!
//! Clustering, assortativity and path statistics all work on the undirected
//! projection of the directed graph.

mod histogram;
mod pagerank;
mod paths;
mod powerlaw;
mod report;
mod rewire;
mod semantic;
mod structure;

pub use histogram::{degree_and_weight_distributions, DegreeDistributions, Histogram};
pub use pagerank::{pagerank, PageRankOptions};
pub use paths::{giant_component, path_stats, GiantComponent, PathStats, EXACT_PATH_LIMIT};
pub use powerlaw::{fit_power_law, hurwitz_zeta, PowerLawFit, MAX_EXPONENT, MIN_TAIL};
pub use report::{topology_report, TopologyOptions, TopologyReport};
pub use rewire::{rewire_null_model, DEFAULT_SWAPS_PER_EDGE};
pub use semantic::{category_weight_profile, mean_weight, peak_hour_interaction_matrix};
pub use structure::{assortativity, clustering_coefficient, Clustering};

use thiserror::Error;

use crate::ingest::VenueIx;

#[derive(Debug, Error, PartialEq)]
pub enum NetStatsError {
    #[error("graph is empty")]
    EmptyGraph,
    #[error("{0} is undefined for this graph")]
    Undefined(&'static str),
    #[error("power-law fit needs at least {need} tail samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("power-law tail is degenerate (all samples equal)")]
    DegenerateTail,
    #[error("power-law samples must be positive integers")]
    NonPositiveSample,
    #[error("pagerank did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("venue {0:?} is not in the registry")]
    UnknownVenue(VenueIx),
    #[error("no activity profile for venue {0:?}")]
    MissingProfile(VenueIx),
    #[error("expected 24-slot profiles, got {0}")]
    WrongResolution(usize),
}
