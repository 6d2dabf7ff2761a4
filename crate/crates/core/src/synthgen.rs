//! Seeded synthetic cities: clustered venues and random-walk check-ins
//! driven by popularity, distance decay and category hour profiles.

use std::f64::consts::PI;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{LogNormal, Normal};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geo::haversine_km;
use crate::ingest::{Category, CheckinEvent, CheckinStream, IngestError, Venue, VenueIx, VenueRegistry};
use crate::snapshot::{SECONDS_PER_DAY, SECONDS_PER_HOUR};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("bounding box has zero area or invalid coordinates: lat [{lat_min}, {lat_max}], lon [{lon_min}, {lon_max}]")]
    DegenerateBox {
        lat_min: f64,
        lat_max: f64,
        lon_min: f64,
        lon_max: f64,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CityConfig {
    pub n_venues: usize,
    pub n_users: usize,
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
    /// Fractions in [`Category::ALL`] order.
    pub category_mix: [f64; 7],
    pub zipf_exponent: f64,
    /// `γ` in the decay `exp(-(d/λ)^γ)`.
    pub decay_exponent: f64,
    /// `λ` in km.
    pub decay_length_km: f64,
    pub days: u32,
    pub seed: u64,
    /// First instant of the simulation, UTC epoch seconds.
    pub start: i64,
    /// Local time offset used for the hour profiles, seconds.
    pub utc_offset: i64,
    /// Median gap between consecutive check-ins of one outing, hours.
    pub gap_median_hours: f64,
    pub gap_sigma: f64,
    /// Upper end of the per-user daily outing probability; the lower end is
    /// a fifth of it.
    pub max_outing_rate: f64,
    /// Chance an outing ends after each check-in.
    pub stop_probability: f64,
    /// Chance each hop goes to one of the user's favorite venues.
    pub habit_probability: f64,
    pub n_favorites: usize,
    /// Width (σ, hours) of the food and travel peaks; nightlife uses 1.5×.
    pub peak_width_hours: f64,
    /// Per-category multiplier on the gap median, in [`Category::ALL`] order.
    pub dwell_factors: [f64; 7],
    /// Attractiveness multiplier outside a venue's opening hours; 1 disables
    /// opening hours.
    pub closed_weight: f64,
}

impl Default for CityConfig {
    fn default() -> Self {
        CityConfig {
            n_venues: 2000,
            n_users: 500,
            lat_min: 40.60,
            lat_max: 40.80,
            lon_min: -74.10,
            lon_max: -73.85,
            category_mix: [0.40, 0.04, 0.12, 0.16, 0.12, 0.08, 0.08],
            zipf_exponent: 1.0,
            decay_exponent: 1.0,
            decay_length_km: 2.0,
            days: 180,
            seed: 0,
            start: 1_356_998_400,
            utc_offset: 0,
            gap_median_hours: 0.5,
            gap_sigma: 0.5,
            max_outing_rate: 1.0,
            stop_probability: 0.05,
            habit_probability: 0.0,
            n_favorites: 8,
            peak_width_hours: 2.0,
            dwell_factors: [0.5, 0.2, 1.0, 0.5, 5.0, 1.0, 1.0],
            closed_weight: 0.05,
        }
    }
}

impl CityConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::Invalid(m.to_string()));
        let box_ok = self.lat_min < self.lat_max
            && self.lon_min < self.lon_max
            && self.lat_min >= -90.0
            && self.lat_max <= 90.0
            && self.lon_min >= -180.0
            && self.lon_max <= 180.0;
        if !box_ok {
            return Err(SynthError::DegenerateBox {
                lat_min: self.lat_min,
                lat_max: self.lat_max,
                lon_min: self.lon_min,
                lon_max: self.lon_max,
            });
        }
        if self.n_venues == 0 || self.n_users == 0 || self.days == 0 {
            return bad("n_venues, n_users and days must be positive");
        }
        if self.category_mix.iter().any(|&f| !(0.0..=1.0).contains(&f)) {
            return bad("category fractions must lie in [0, 1]");
        }
        if (self.category_mix.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad("category fractions must sum to 1");
        }
        if !(self.decay_length_km > 0.0 && self.decay_exponent > 0.0) {
            return bad("decay length and exponent must be positive");
        }
        if !(self.gap_median_hours > 0.0 && self.gap_sigma > 0.0 && self.peak_width_hours > 0.0) {
            return bad("gap median, gap sigma and peak width must be positive");
        }
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !(unit(self.max_outing_rate) && unit(self.habit_probability) && self.stop_probability > 0.0 && self.stop_probability <= 1.0) {
            return bad("outing rate and habit probability must lie in [0, 1], stop probability in (0, 1]");
        }
        if !(0.0..=1.0).contains(&self.closed_weight) {
            return bad("closed weight must lie in [0, 1]");
        }
        if self.dwell_factors.iter().any(|&f| !(f > 0.0 && f.is_finite())) {
            return bad("dwell factors must be positive");
        }
        if self.zipf_exponent < 0.0 || self.start <= 0 {
            return bad("zipf exponent must be nonnegative and start positive");
        }
        Ok(())
    }

    pub fn end(&self) -> i64 {
        self.start + self.days as i64 * SECONDS_PER_DAY
    }

    /// Applies `key = value` lines; `#` starts a comment. Category fractions
    /// use keys like `mix.food`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), SynthError> {
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| SynthError::Parse { line: k + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
            self.set(key.trim(), value.trim()).map_err(err)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self, SynthError> {
        let text = std::fs::read_to_string(path).map_err(|source| SynthError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut c = CityConfig::default();
        c.apply_text(&text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn p<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("bad value `{v}` for `{key}`"))
        }
        match key {
            "n_venues" => self.n_venues = p(key, value)?,
            "n_users" => self.n_users = p(key, value)?,
            "lat_min" => self.lat_min = p(key, value)?,
            "lat_max" => self.lat_max = p(key, value)?,
            "lon_min" => self.lon_min = p(key, value)?,
            "lon_max" => self.lon_max = p(key, value)?,
            "zipf_exponent" => self.zipf_exponent = p(key, value)?,
            "decay_exponent" => self.decay_exponent = p(key, value)?,
            "decay_length_km" => self.decay_length_km = p(key, value)?,
            "days" => self.days = p(key, value)?,
            "seed" => self.seed = p(key, value)?,
            "start" => self.start = p(key, value)?,
            "utc_offset" => self.utc_offset = p(key, value)?,
            "gap_median_hours" => self.gap_median_hours = p(key, value)?,
            "gap_sigma" => self.gap_sigma = p(key, value)?,
            "max_outing_rate" => self.max_outing_rate = p(key, value)?,
            "stop_probability" => self.stop_probability = p(key, value)?,
            "habit_probability" => self.habit_probability = p(key, value)?,
            "n_favorites" => self.n_favorites = p(key, value)?,
            "peak_width_hours" => self.peak_width_hours = p(key, value)?,
            "closed_weight" => self.closed_weight = p(key, value)?,
            _ => {
                let cat = |prefix: &str| {
                    key.strip_prefix(prefix)
                        .and_then(|c| c.parse::<Category>().ok())
                        .map(Category::index)
                };
                if let Some(k) = cat("mix.") {
                    self.category_mix[k] = p(key, value)?;
                } else if let Some(k) = cat("dwell.") {
                    self.dwell_factors[k] = p(key, value)?;
                } else {
                    return Err(format!("unknown key `{key}`"));
                }
            }
        }
        Ok(())
    }
}

/// Planar km coordinates around the box center; accurate to well under a
/// percent at city scale.
struct Plane {
    lat0: f64,
    lon0: f64,
    kx: f64,
    ky: f64,
}

impl Plane {
    fn new(c: &CityConfig) -> Self {
        let lat0 = 0.5 * (c.lat_min + c.lat_max);
        let ky = PI / 180.0 * crate::geo::EARTH_RADIUS_KM;
        Plane {
            lat0,
            lon0: 0.5 * (c.lon_min + c.lon_max),
            kx: ky * lat0.to_radians().cos(),
            ky,
        }
    }

    fn to_xy(&self, lat: f64, lon: f64) -> (f64, f64) {
        ((lon - self.lon0) * self.kx, (lat - self.lat0) * self.ky)
    }

    fn to_latlon(&self, x: f64, y: f64) -> (f64, f64) {
        (self.lat0 + y / self.ky, self.lon0 + x / self.kx)
    }
}

/// Venues scattered around `n_venues / 50` uniform Gaussian centers with
/// `σ` = 1% of the box diagonal; categories drawn from the mix.
pub fn generate_city(config: &CityConfig) -> Result<VenueRegistry, SynthError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let plane = Plane::new(config);
    let diagonal = haversine_km(config.lat_min, config.lon_min, config.lat_max, config.lon_max);
    let sigma = 0.01 * diagonal;
    let n_centers = (config.n_venues / 50).max(1);
    let centers: Vec<(f64, f64)> = (0..n_centers)
        .map(|_| {
            let lat = rng.random_range(config.lat_min..config.lat_max);
            let lon = rng.random_range(config.lon_min..config.lon_max);
            plane.to_xy(lat, lon)
        })
        .collect();
    let jitter = Normal::new(0.0, sigma).expect("positive sigma");
    let mix = WeightedIndex::new(config.category_mix).map_err(|e| SynthError::Invalid(e.to_string()))?;
    let width = (config.n_venues - 1).to_string().len().max(5);
    let mut venues = Vec::with_capacity(config.n_venues);
    for k in 0..config.n_venues {
        let (cx, cy) = centers[rng.random_range(0..n_centers)];
        let (lat, lon) = plane.to_latlon(cx + jitter.sample(&mut rng), cy + jitter.sample(&mut rng));
        venues.push(Venue {
            id: format!("v{k:0width$}"),
            lat: lat.clamp(config.lat_min, config.lat_max),
            lon: lon.clamp(config.lon_min, config.lon_max),
            category: Category::ALL[mix.sample(&mut rng)],
        });
    }
    Ok(VenueRegistry::from_venues(venues)?)
}

fn bump(hour: f64, center: f64, width: f64) -> f64 {
    let d = (hour - center).rem_euclid(24.0);
    let d = d.min(24.0 - d);
    (-d * d / (2.0 * width * width)).exp()
}

/// Relative attractiveness of a category at a local hour and weekday
/// (0 = Monday).
pub fn category_hour_weight(category: Category, hour: f64, weekday: u32, width: f64) -> f64 {
    let workday = weekday < 5;
    match category {
        Category::Food => 0.1 + bump(hour, 12.0, width) + bump(hour, 19.0, width),
        Category::Travel if workday => 0.1 + bump(hour, 8.0, width) + bump(hour, 18.0, width),
        Category::Travel => 0.1 + 0.4 * bump(hour, 14.0, 3.0 * width),
        Category::Nightlife => {
            // Friday and Saturday nights, through to the next morning
            let weekend_night = (weekday == 4 || weekday == 5) && hour >= 18.0 || (weekday == 5 || weekday == 6) && hour < 6.0;
            let scale = if weekend_night { 2.0 } else { 0.6 };
            scale * (0.05 + 1.2 * bump(hour, 0.0, 1.5 * width))
        }
        Category::Work if workday && (9.0..=17.0).contains(&hour) => 1.0,
        Category::Work => 0.05,
        Category::Shop | Category::Outdoors | Category::Other => 0.4,
    }
}

/// Hour-of-week weights per venue: the category profile, scaled by
/// `closed_weight` outside the venue's daily opening window and on its
/// closing day, if any. Travel venues are open 05:00 to midnight every day.
fn opening_profiles(registry: &VenueRegistry, config: &CityConfig) -> Vec<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(u64::MAX - 1);
    let mut out = Vec::with_capacity(registry.len() * 168);
    for v in registry.venues() {
        let (open, length, closed_day) = match v.category {
            Category::Travel => (5, 19, None),
            Category::Nightlife => (rng.random_range(17..=22), rng.random_range(6..=10), None),
            _ => (
                rng.random_range(6..=12),
                rng.random_range(8..=15),
                rng.random_bool(0.3).then(|| rng.random_range(0..7)),
            ),
        };
        for slot in 0..168u32 {
            let (day, hour) = (slot / 24, slot % 24);
            let is_open = (hour + 24 - open) % 24 < length && closed_day != Some(day);
            let w = category_hour_weight(v.category, hour as f64, day, config.peak_width_hours);
            out.push((if is_open { w } else { w * config.closed_weight }) as f32);
        }
    }
    out
}

struct Walker<'a> {
    config: &'a CityConfig,
    xy: Vec<(f64, f64)>,
    category: Vec<u8>,
    /// Row-major `popularity(v) · decay(d(u, v))`.
    attraction: Vec<f32>,
    travel: Vec<usize>,
    /// Per venue, 168 hour-of-week weights: category profile times opening
    /// hours.
    hours: Vec<f32>,
}

impl Walker<'_> {
    fn decay(&self, u: usize, v: usize) -> f64 {
        let ((ux, uy), (x, y)) = (self.xy[u], self.xy[v]);
        let d = ((x - ux).powi(2) + (y - uy).powi(2)).sqrt();
        (-(d / self.config.decay_length_km).powf(self.config.decay_exponent)).exp()
    }

    /// `popularity(v) · decay(d(from, v))` for every `v` in `candidates`
    /// (all venues when `None`), times the hour profile when `local` is given.
    fn pick(
        &self,
        rng: &mut ChaCha8Rng,
        candidates: Option<&[usize]>,
        from: usize,
        local: Option<i64>,
        weights: &mut Vec<f64>,
    ) -> usize {
        let n = self.xy.len();
        let row = &self.attraction[from * n..(from + 1) * n];
        let slot = local.map(|t| {
            let hour = t.rem_euclid(SECONDS_PER_DAY) / SECONDS_PER_HOUR;
            let weekday = (t.div_euclid(SECONDS_PER_DAY) + 3).rem_euclid(7);
            (weekday * 24 + hour) as usize
        });
        weights.clear();
        let mut total = 0.0;
        let mut push = |v: usize| {
            let mut w = row[v] as f64;
            if let Some(k) = slot {
                w *= self.hours[v * 168 + k] as f64;
            }
            total += w;
            weights.push(total);
        };
        match candidates {
            Some(c) => c.iter().for_each(|&v| push(v)),
            None => (0..n).for_each(push),
        }
        let len = weights.len();
        let k = if total > 0.0 {
            let r = rng.random::<f64>() * total;
            weights.partition_point(|&c| c <= r).min(len - 1)
        } else {
            rng.random_range(0..len)
        };
        candidates.map_or(k, |c| c[k])
    }

    /// One user's check-ins. Users go out on a random subset of days; each
    /// outing starts from home in the morning and hops between venues with
    /// log-normal gaps until it stops or runs past 02:00.
    fn user(&self, index: usize) -> Vec<CheckinEvent> {
        let c = self.config;
        let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
        rng.set_stream(index as u64 + 1);
        let gap = LogNormal::new(0.0, c.gap_sigma).expect("valid gap");
        let base = c.gap_median_hours * SECONDS_PER_HOUR as f64;
        let home = rng.random_range(0..self.xy.len());
        let activity = rng.random_range(0.2 * c.max_outing_rate..=c.max_outing_rate);
        let user = format!("u{index:05}");
        let mut out = Vec::new();
        let mut weights = Vec::with_capacity(self.xy.len());
        // a travel hub near home plus personal places drawn by distance alone
        let mut favorites = Vec::new();
        if c.habit_probability > 0.0 {
            if !self.travel.is_empty() {
                favorites.push(self.pick(&mut rng, Some(&self.travel), home, None, &mut weights));
            }
            let near: Vec<f64> = (0..self.xy.len()).map(|v| self.decay(home, v)).collect();
            let near = WeightedIndex::new(&near).ok();
            for _ in 0..c.n_favorites * 4 {
                if favorites.len() > c.n_favorites {
                    break;
                }
                let Some(near) = &near else { break };
                let v = near.sample(&mut rng);
                if !favorites.contains(&v) {
                    favorites.push(v);
                }
            }
        }
        for day in 0..c.days as i64 {
            if !rng.random_bool(activity) {
                continue;
            }
            let day_start = c.start + day * SECONDS_PER_DAY - c.utc_offset;
            let day_end = (day_start + 26 * SECONDS_PER_HOUR).min(c.end());
            let mut t = day_start + rng.random_range(7 * SECONDS_PER_HOUR..12 * SECONDS_PER_HOUR);
            let mut at = home;
            while t < day_end && t >= c.start {
                let habitual = !favorites.is_empty() && rng.random_bool(c.habit_probability);
                let pool = habitual.then_some(favorites.as_slice());
                let v = self.pick(&mut rng, pool, at, Some(t + c.utc_offset), &mut weights);
                out.push(CheckinEvent {
                    user: user.clone(),
                    venue: VenueIx(v as u32),
                    timestamp: t,
                });
                at = v;
                if rng.random_bool(c.stop_probability) {
                    break;
                }
                let median = base * c.dwell_factors[self.category[v] as usize];
                t += (median * gap.sample(&mut rng)).max(60.0) as i64;
            }
        }
        out
    }
}

/// Simulates every user independently with its own RNG stream split from the
/// master seed, so the output does not depend on thread scheduling.
pub fn generate_checkins(registry: &VenueRegistry, config: &CityConfig) -> Result<CheckinStream, SynthError> {
    config.validate()?;
    let plane = Plane::new(config);
    let n = registry.len();
    // Zipf popularity over a seeded random ranking of venues.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(u64::MAX);
    let mut rank: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(rank.as_mut_slice(), &mut rng);
    let mut popularity = vec![0.0; n];
    for (r, &v) in rank.iter().enumerate() {
        popularity[v] = 1.0 / ((r + 1) as f64).powf(config.zipf_exponent);
    }
    let hours = opening_profiles(registry, config);
    let xy: Vec<(f64, f64)> = registry.venues().iter().map(|v| plane.to_xy(v.lat, v.lon)).collect();
    let (lambda, gamma) = (config.decay_length_km, config.decay_exponent);
    let attraction = xy
        .par_iter()
        .flat_map_iter(|&(ux, uy)| {
            xy.iter().zip(&popularity).map(move |(&(x, y), &p)| {
                let d = ((x - ux).powi(2) + (y - uy).powi(2)).sqrt();
                (p * (-(d / lambda).powf(gamma)).exp()) as f32
            })
        })
        .collect();
    let walker = Walker {
        config,
        category: registry.venues().iter().map(|v| v.category.index() as u8).collect(),
        attraction,
        xy,
        travel: registry.iter().filter(|(_, v)| v.category == Category::Travel).map(|(ix, _)| ix.index()).collect(),
        hours,
    };
    let events: Vec<CheckinEvent> = (0..config.n_users).into_par_iter().flat_map_iter(|u| walker.user(u)).collect();
    Ok(CheckinStream::from_events(events))
}

pub fn generate(config: &CityConfig) -> Result<(VenueRegistry, CheckinStream), SynthError> {
    let registry = generate_city(config)?;
    let stream = generate_checkins(&registry, config)?;
    Ok((registry, stream))
}
