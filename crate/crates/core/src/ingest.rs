//! Venue registries and check-in streams.
//!
//! The registry is a CSV file with header `venue_id,lat,lon,category`. Check-ins
//! are line-delimited JSON objects `{"user": .., "venue": .., "ts": ..}`; lines
//! starting with `#` and blank lines are skipped.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: coordinate out of range ({field} = {value})")]
    CoordinateOutOfRange {
        line: usize,
        field: &'static str,
        value: f64,
    },
    #[error("duplicate venue id `{0}`")]
    DuplicateVenue(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl IngestError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        IngestError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// Place categories. Anything outside the seven labels collapses to `Other`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Food,
    Travel,
    Nightlife,
    Shop,
    Work,
    Outdoors,
    Other,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::Food,
        Category::Travel,
        Category::Nightlife,
        Category::Shop,
        Category::Work,
        Category::Outdoors,
        Category::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Food => "food",
            Category::Travel => "travel",
            Category::Nightlife => "nightlife",
            Category::Shop => "shop",
            Category::Work => "work",
            Category::Outdoors => "outdoors",
            Category::Other => "other",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Category::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or(())
    }
}

/// Index of a venue inside a [`VenueRegistry`].
///
/// Registries keep venues sorted by id, so ordering on `VenueIx` is the same
/// as lexicographic ordering on venue ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VenueIx(pub u32);

impl VenueIx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Venue {
    pub id: String,
    pub lat: f64,
    pub lon: f64,
    pub category: Category,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VenueRegistry {
    venues: Vec<Venue>,
    index: HashMap<String, VenueIx>,
    /// Rows whose category label was not recognised and fell back to `other`.
    pub unknown_categories: usize,
}

impl VenueRegistry {
    /// Builds a registry, sorting venues by id. Fails on a duplicate id or an
    /// out-of-range coordinate (reported with the venue's position in `venues`).
    pub fn from_venues(mut venues: Vec<Venue>) -> Result<Self, IngestError> {
        for (i, v) in venues.iter().enumerate() {
            check_coordinates(v.lat, v.lon, i + 1)?;
        }
        venues.sort_by(|a, b| a.id.cmp(&b.id));
        let mut index = HashMap::with_capacity(venues.len());
        for (i, v) in venues.iter().enumerate() {
            if index.insert(v.id.clone(), VenueIx(i as u32)).is_some() {
                return Err(IngestError::DuplicateVenue(v.id.clone()));
            }
        }
        Ok(VenueRegistry {
            venues,
            index,
            unknown_categories: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.venues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.venues.is_empty()
    }

    pub fn lookup(&self, id: &str) -> Option<VenueIx> {
        self.index.get(id).copied()
    }

    pub fn venue(&self, ix: VenueIx) -> &Venue {
        &self.venues[ix.index()]
    }

    pub fn get(&self, ix: VenueIx) -> Option<&Venue> {
        self.venues.get(ix.index())
    }

    pub fn id(&self, ix: VenueIx) -> &str {
        &self.venues[ix.index()].id
    }

    pub fn iter(&self) -> impl Iterator<Item = (VenueIx, &Venue)> {
        self.venues
            .iter()
            .enumerate()
            .map(|(i, v)| (VenueIx(i as u32), v))
    }

    pub fn venues(&self) -> &[Venue] {
        &self.venues
    }

    /// Writes the registry in the CSV layout accepted by [`read_registry`].
    /// Coordinates are printed with six decimals.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), IngestError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["venue_id", "lat", "lon", "category"])?;
        for v in &self.venues {
            w.write_record([
                v.id.as_str(),
                &format!("{:.6}", v.lat),
                &format!("{:.6}", v.lon),
                v.category.as_str(),
            ])?;
        }
        w.flush().map_err(|e| IngestError::Csv(e.into()))?;
        Ok(())
    }
}

fn check_coordinates(lat: f64, lon: f64, line: usize) -> Result<(), IngestError> {
    if !(-90.0..=90.0).contains(&lat) || !lat.is_finite() {
        return Err(IngestError::CoordinateOutOfRange {
            line,
            field: "lat",
            value: lat,
        });
    }
    if !(-180.0..=180.0).contains(&lon) || !lon.is_finite() {
        return Err(IngestError::CoordinateOutOfRange {
            line,
            field: "lon",
            value: lon,
        });
    }
    Ok(())
}

pub fn load_registry(path: impl AsRef<Path>) -> Result<VenueRegistry, IngestError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    read_registry(file)
}

/// Parses a registry CSV. Line numbers in errors are 1-based file lines, so
/// the first data row is line 2.
pub fn read_registry<R: Read>(input: R) -> Result<VenueRegistry, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = rdr.headers()?.clone();
    let expected = ["venue_id", "lat", "lon", "category"];
    if headers.len() != 4 || headers.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(IngestError::Malformed {
            line: 1,
            message: format!("expected header `venue_id,lat,lon,category`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }

    let mut venues = Vec::new();
    let mut unknown = 0;
    let mut seen: HashMap<String, usize> = HashMap::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != 4 {
            return Err(IngestError::Malformed {
                line,
                message: format!("expected 4 fields, found {}", record.len()),
            });
        }
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(IngestError::Malformed {
                line,
                message: "empty venue_id".into(),
            });
        }
        let lat = parse_f64(&record[1], "lat", line)?;
        let lon = parse_f64(&record[2], "lon", line)?;
        check_coordinates(lat, lon, line)?;
        let category = match record[3].parse::<Category>() {
            Ok(c) => c,
            Err(()) => {
                unknown += 1;
                Category::Other
            }
        };
        if seen.insert(id.clone(), line).is_some() {
            return Err(IngestError::DuplicateVenue(id));
        }
        venues.push(Venue {
            id,
            lat,
            lon,
            category,
        });
    }
    let mut registry = VenueRegistry::from_venues(venues)?;
    registry.unknown_categories = unknown;
    Ok(registry)
}

fn parse_f64(s: &str, field: &str, line: usize) -> Result<f64, IngestError> {
    s.parse::<f64>().map_err(|_| IngestError::Malformed {
        line,
        message: format!("cannot parse {field} `{s}`"),
    })
}

/// One visit. `venue` resolves in the registry the stream was loaded against.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CheckinEvent {
    pub user: String,
    pub venue: VenueIx,
    pub timestamp: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckinStream {
    events: Vec<CheckinEvent>,
    /// Records that referenced a venue missing from the registry.
    pub dropped_unknown_venue: usize,
    /// Records repeating an already seen (user, venue, timestamp) triple.
    pub dropped_duplicates: usize,
}

impl CheckinStream {
    /// Normalizes events: sorts by (user, timestamp, venue) and collapses
    /// duplicate triples.
    pub fn from_events(mut events: Vec<CheckinEvent>) -> Self {
        events.sort_by(|a, b| {
            a.user
                .cmp(&b.user)
                .then(a.timestamp.cmp(&b.timestamp))
                .then(a.venue.cmp(&b.venue))
        });
        let before = events.len();
        events.dedup();
        CheckinStream {
            dropped_duplicates: before - events.len(),
            events,
            dropped_unknown_venue: 0,
        }
    }

    pub fn events(&self) -> &[CheckinEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Total records dropped for any reason.
    pub fn dropped(&self) -> usize {
        self.dropped_unknown_venue + self.dropped_duplicates
    }

    /// Observed `[min_ts, max_ts]`, `None` for an empty stream.
    pub fn time_span(&self) -> Option<(i64, i64)> {
        let min = self.events.iter().map(|e| e.timestamp).min()?;
        let max = self.events.iter().map(|e| e.timestamp).max()?;
        Some((min, max))
    }

    /// Iterates events grouped per user, each group in timestamp order.
    pub fn by_user(&self) -> impl Iterator<Item = &[CheckinEvent]> {
        self.events.chunk_by(|a, b| a.user == b.user)
    }

    /// Writes the stream as line-delimited JSON, the format read by
    /// [`read_checkins`].
    pub fn write_jsonl<W: Write>(&self, registry: &VenueRegistry, mut out: W) -> std::io::Result<()> {
        for e in &self.events {
            let rec = RawCheckinOut {
                user: &e.user,
                venue: registry.id(e.venue),
                ts: e.timestamp,
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }
}

#[derive(Serialize)]
struct RawCheckinOut<'a> {
    user: &'a str,
    venue: &'a str,
    ts: i64,
}

#[derive(Deserialize)]
struct RawCheckin {
    user: IdField,
    venue: IdField,
    ts: i64,
}

/// Ids may arrive as JSON strings or integers.
#[derive(Deserialize)]
#[serde(untagged)]
enum IdField {
    Str(String),
    Int(i64),
}

impl IdField {
    fn into_string(self) -> String {
        match self {
            IdField::Str(s) => s,
            IdField::Int(i) => i.to_string(),
        }
    }
}

pub fn load_checkins(
    path: impl AsRef<Path>,
    registry: &VenueRegistry,
) -> Result<CheckinStream, IngestError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    read_checkins(BufReader::new(file), registry)
}

pub fn read_checkins<R: BufRead>(
    input: R,
    registry: &VenueRegistry,
) -> Result<CheckinStream, IngestError> {
    let mut events = Vec::new();
    let mut unknown = 0;
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| IngestError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let raw: RawCheckin = serde_json::from_str(trimmed).map_err(|e| IngestError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        if raw.ts <= 0 {
            return Err(IngestError::Malformed {
                line: line_no,
                message: format!("timestamp must be positive, got {}", raw.ts),
            });
        }
        let venue = raw.venue.into_string();
        match registry.lookup(&venue) {
            Some(ix) => events.push(CheckinEvent {
                user: raw.user.into_string(),
                venue: ix,
                timestamp: raw.ts,
            }),
            None => unknown += 1,
        }
    }
    let mut stream = CheckinStream::from_events(events);
    stream.dropped_unknown_venue = unknown;
    Ok(stream)
}

#[cfg(test)]
mod tests {
    use super::*;

    const REGISTRY: &str = "venue_id,lat,lon,category\n\
        a,51.5,-0.12,food\n\
        b,51.6,-0.10,travel\n\
        c,51.4,-0.11,nightlife\n";

    fn registry() -> VenueRegistry {
        read_registry(REGISTRY.as_bytes()).unwrap()
    }

    #[test]
    fn registry_row_count_preserved() {
        let r = registry();
        assert_eq!(r.len(), 3);
        assert_eq!(r.unknown_categories, 0);
        assert_eq!(r.venue(r.lookup("b").unwrap()).category, Category::Travel);
    }

    #[test]
    fn latitude_out_of_range_cites_line() {
        let csv = "venue_id,lat,lon,category\na,91,0,food\n";
        match read_registry(csv.as_bytes()) {
            Err(IngestError::CoordinateOutOfRange { line, field, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(field, "lat");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_category_falls_back_to_other() {
        let csv = "venue_id,lat,lon,category\na,10,10,museum\n";
        let r = read_registry(csv.as_bytes()).unwrap();
        assert_eq!(r.venues()[0].category, Category::Other);
        assert_eq!(r.unknown_categories, 1);
    }

    #[test]
    fn duplicate_venue_names_the_id() {
        let csv = "venue_id,lat,lon,category\nzz,1,1,food\nzz,2,2,food\n";
        let err = read_registry(csv.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("zz"), "{err}");
    }

    #[test]
    fn registry_sorted_by_id() {
        let csv = "venue_id,lat,lon,category\nc,1,1,food\na,2,2,food\nb,3,3,food\n";
        let r = read_registry(csv.as_bytes()).unwrap();
        let ids: Vec<_> = r.iter().map(|(_, v)| v.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
    }

    #[test]
    fn unknown_venues_dropped_and_counted() {
        let lines = r#"{"user":"u1","venue":"a","ts":100}
{"user":"u1","venue":"b","ts":200}
{"user":"u2","venue":"zzz","ts":300}
{"user":"u2","venue":"c","ts":400}
{"user":"u3","venue":"a","ts":500}
"#;
        let s = read_checkins(lines.as_bytes(), &registry()).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.dropped_unknown_venue, 1);
        assert_eq!(s.dropped() + s.len(), 5);
    }

    #[test]
    fn unsorted_input_is_sorted() {
        let lines = r#"{"user":"u2","venue":"a","ts":50}
{"user":"u1","venue":"b","ts":200}
# comment
{"user":"u1","venue":"a","ts":100}
"#;
        let s = read_checkins(lines.as_bytes(), &registry()).unwrap();
        let keys: Vec<_> = s.events().iter().map(|e| (e.user.as_str(), e.timestamp)).collect();
        assert_eq!(keys, [("u1", 100), ("u1", 200), ("u2", 50)]);
        assert_eq!(s.time_span(), Some((50, 200)));
    }

    #[test]
    fn identical_lines_collapse() {
        let lines = "{\"user\":\"u\",\"venue\":\"a\",\"ts\":10}\n{\"user\":\"u\",\"venue\":\"a\",\"ts\":10}\n";
        let s = read_checkins(lines.as_bytes(), &registry()).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.dropped_duplicates, 1);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let lines = "{\"user\":\"u\",\"venue\":\"a\",\"ts\":10}\nnot json\n";
        match read_checkins(lines.as_bytes(), &registry()) {
            Err(IngestError::Malformed { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_empty_stream() {
        let s = read_checkins("".as_bytes(), &registry()).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.time_span(), None);
    }

    #[test]
    fn integer_ids_accepted() {
        let csv = "venue_id,lat,lon,category\n7,1,1,shop\n";
        let r = read_registry(csv.as_bytes()).unwrap();
        let s = read_checkins("{\"user\":42,\"venue\":7,\"ts\":5}".as_bytes(), &r).unwrap();
        assert_eq!(s.events()[0].user, "42");
    }

    #[test]
    fn non_positive_timestamp_rejected() {
        let err = read_checkins("{\"user\":\"u\",\"venue\":\"a\",\"ts\":0}".as_bytes(), &registry());
        assert!(matches!(err, Err(IngestError::Malformed { line: 1, .. })));
    }
}
