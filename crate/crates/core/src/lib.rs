//! Place networks from check-in streams: snapshot construction, topology and
//! persistence statistics, and link prediction benchmarks.

pub mod cli;
pub mod dynamics;
pub mod eval;
pub mod geo;
pub mod ingest;
pub mod netstats;
pub mod predict;
pub mod snapshot;
pub mod synthgen;
