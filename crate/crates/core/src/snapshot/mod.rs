//! Temporal snapshots: direct transitions, windowed place graphs and hourly
//! activity profiles.

mod export;
mod graph;

pub use export::{
    read_snapshot, read_snapshot_dir, snapshot_stem, write_snapshot, write_snapshot_dir, SnapshotMeta,
};
pub use graph::{PlaceGraph, Topology, Window};
pub(crate) use graph::sorted_intersection_count;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ingest::{CheckinStream, VenueIx};

pub const SECONDS_PER_HOUR: i64 = 3600;
pub const SECONDS_PER_DAY: i64 = 86_400;
/// Direct transitions further apart than this are not movements.
pub const DEFAULT_GAP_THRESHOLD: i64 = 3 * SECONDS_PER_HOUR;
/// Three-month snapshots.
pub const DEFAULT_WINDOW_LENGTH: i64 = 90 * SECONDS_PER_DAY;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("profile resolution must be 24 or 168 slots, got {0}")]
    BadResolution(usize),
    #[error("window length must be positive, got {0}")]
    BadWindowLength(i64),
    #[error("{0}")]
    Io(String),
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
}

/// A user moving directly from `origin` to `dest`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Transition {
    pub origin: VenueIx,
    pub dest: VenueIx,
    pub user: String,
    pub t_origin: i64,
    pub t_dest: i64,
}

/// Extracts consecutive check-in pairs per user with distinct venues and
/// `0 < t_dest - t_origin <= gap_threshold`.
///
/// Only directly consecutive pairs count: a chain A→B→C yields A→B and B→C.
pub fn extract_transitions(stream: &CheckinStream, gap_threshold: i64) -> Vec<Transition> {
    let mut out = Vec::new();
    for events in stream.by_user() {
        for pair in events.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let gap = b.timestamp - a.timestamp;
            if a.venue != b.venue && gap > 0 && gap <= gap_threshold {
                out.push(Transition {
                    origin: a.venue,
                    dest: b.venue,
                    user: a.user.clone(),
                    t_origin: a.timestamp,
                    t_dest: b.timestamp,
                });
            }
        }
    }
    out
}

/// Aggregates the transitions whose `t_origin` falls in `window`.
pub fn build_graph(transitions: &[Transition], window: Window) -> PlaceGraph {
    PlaceGraph::from_weighted_edges(
        window,
        transitions
            .iter()
            .filter(|t| window.contains(t.t_origin))
            .map(|t| (t.origin, t.dest, 1)),
    )
}

/// Consecutive half-open windows of `window_length` starting at `t0` that
/// cover everything up to `last_ts`. Always at least one window.
pub fn windows(t0: i64, window_length: i64, last_ts: i64) -> Result<Vec<Window>, SnapshotError> {
    if window_length <= 0 {
        return Err(SnapshotError::BadWindowLength(window_length));
    }
    let count = if last_ts < t0 {
        1
    } else {
        (last_ts - t0) / window_length + 1
    };
    Ok((0..count)
        .map(|k| Window::new(t0 + k * window_length, t0 + (k + 1) * window_length))
        .collect())
}

/// Splits a stream into consecutive snapshots starting at `t0`.
pub fn window_stream(
    stream: &CheckinStream,
    gap_threshold: i64,
    window_length: i64,
    t0: i64,
) -> Result<Vec<PlaceGraph>, SnapshotError> {
    let last = stream.time_span().map_or(t0, |(_, max)| max);
    let transitions = extract_transitions(stream, gap_threshold);
    Ok(windows(t0, window_length, last)?
        .into_iter()
        .map(|w| build_graph(&transitions, w))
        .collect())
}

/// Local-time slot of a timestamp: hour of day for 24 slots, hour of week
/// (Monday 00:00 is slot 0) for 168.
pub fn time_slot(ts: i64, utc_offset: i64, slots: usize) -> usize {
    let local = ts + utc_offset;
    let hour = local.rem_euclid(SECONDS_PER_DAY) / SECONDS_PER_HOUR;
    if slots == 24 {
        return hour as usize;
    }
    // 1970-01-01 was a Thursday.
    let weekday = (local.div_euclid(SECONDS_PER_DAY) + 3).rem_euclid(7);
    (weekday * 24 + hour) as usize
}

/// Hourly activity of one venue within a snapshot window.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityProfile {
    pub venue: VenueIx,
    pub checkins: Vec<f64>,
    pub out_strength: Vec<f64>,
    pub in_strength: Vec<f64>,
}

impl ActivityProfile {
    pub fn zeros(venue: VenueIx, slots: usize) -> Self {
        ActivityProfile {
            venue,
            checkins: vec![0.0; slots],
            out_strength: vec![0.0; slots],
            in_strength: vec![0.0; slots],
        }
    }

    pub fn slots(&self) -> usize {
        self.checkins.len()
    }

    /// Total check-ins, the venue's popularity.
    pub fn popularity(&self) -> f64 {
        self.checkins.iter().sum()
    }

    /// Slot with the most check-ins, earliest on ties.
    pub fn peak_slot(&self) -> usize {
        let mut best = 0;
        for (i, &c) in self.checkins.iter().enumerate() {
            if c > self.checkins[best] {
                best = i;
            }
        }
        best
    }
}

/// Per-venue profiles for `graph`'s window.
///
/// Check-ins are binned by local slot of their timestamp; out/in strength by
/// the local slot of `t_origin`/`t_dest` of the transitions that make up the
/// graph. Every graph node and every venue checked in during the window gets
/// a profile.
pub fn activity_profiles(
    stream: &CheckinStream,
    transitions: &[Transition],
    graph: &PlaceGraph,
    slots: usize,
    utc_offset: i64,
) -> Result<BTreeMap<VenueIx, ActivityProfile>, SnapshotError> {
    if slots != 24 && slots != 168 {
        return Err(SnapshotError::BadResolution(slots));
    }
    let window = graph.window();
    let mut profiles: BTreeMap<VenueIx, ActivityProfile> = graph
        .nodes()
        .iter()
        .map(|&v| (v, ActivityProfile::zeros(v, slots)))
        .collect();
    for e in stream.events().iter().filter(|e| window.contains(e.timestamp)) {
        profiles
            .entry(e.venue)
            .or_insert_with(|| ActivityProfile::zeros(e.venue, slots))
            .checkins[time_slot(e.timestamp, utc_offset, slots)] += 1.0;
    }
    for t in transitions.iter().filter(|t| window.contains(t.t_origin)) {
        if let Some(p) = profiles.get_mut(&t.origin) {
            p.out_strength[time_slot(t.t_origin, utc_offset, slots)] += 1.0;
        }
        if let Some(p) = profiles.get_mut(&t.dest) {
            p.in_strength[time_slot(t.t_dest, utc_offset, slots)] += 1.0;
        }
    }
    Ok(profiles)
}
