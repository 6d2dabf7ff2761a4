//! Command-line front end.
//!
//! Every subcommand writes its artifacts under `--out` plus a JSON report that
//! echoes the effective [`RunArgs`] and the tool version. Files created by a
//! failed run are removed again.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::dynamics::{growth_curve, new_venue_fraction, snapshot_dynamics};
use crate::eval::{temporal_cross_validation, write_scores_csv, CandidateMode, CandidateOptions, EvalConfig};
use crate::ingest::{load_checkins, load_registry, CheckinStream, VenueRegistry};
use crate::netstats::{
    category_weight_profile, degree_and_weight_distributions, fit_power_law, mean_weight, topology_report,
    TopologyOptions,
};
use crate::predict::write_features_csv;
use crate::snapshot::{
    extract_transitions, read_snapshot_dir, snapshot_stem, window_stream, write_snapshot, PlaceGraph,
    SECONDS_PER_DAY, SECONDS_PER_HOUR,
};
use crate::synthgen::{generate, CityConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "placenet", version, about = "Place networks from check-in streams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Synthesize a venue registry and check-in stream.
    Generate(RunArgs),
    /// Cut the stream into windowed snapshots.
    Snapshots(RunArgs),
    /// Topology statistics per snapshot.
    Stats(RunArgs),
    /// Growth, persistence and turnover.
    Dynamics(RunArgs),
    /// Link-prediction benchmark over a snapshot directory.
    Evaluate(RunArgs),
    /// All of the above; generates a city when no input is given.
    Pipeline(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::Snapshots(_) => "snapshots",
            Command::Stats(_) => "stats",
            Command::Dynamics(_) => "dynamics",
            Command::Evaluate(_) => "evaluate",
            Command::Pipeline(_) => "pipeline",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Generate(a)
            | Command::Snapshots(a)
            | Command::Stats(a)
            | Command::Dynamics(a)
            | Command::Evaluate(a)
            | Command::Pipeline(a) => a,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    /// Check-in file, one JSON object per line.
    #[arg(long)]
    pub checkins: Option<PathBuf>,
    /// Venue registry CSV.
    #[arg(long)]
    pub venues: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Snapshot directory read by `evaluate` [default: <out>/snapshots].
    #[arg(long)]
    pub snapshots: Option<PathBuf>,
    /// Generator config file (`key = value` lines).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Generator setting `key=value`; repeatable, applied after `--config`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long, default_value_t = 90)]
    pub window_days: u32,
    #[arg(long, default_value_t = 3.0)]
    pub gap_hours: f64,
    /// Strength-vector resolution for dynamic gravity: 24 or 168.
    #[arg(long = "T", default_value_t = 168)]
    #[serde(rename = "T")]
    pub slots: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Local time offset from UTC, hours.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub utc_offset: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub negative_ratio: usize,
    #[arg(long, default_value_t = CandidateMode::Sampled)]
    pub candidates: CandidateMode,
    #[arg(long)]
    pub new_edges_only: bool,
    /// Add rewired null-model statistics to `stats`.
    #[arg(long)]
    pub null_model: bool,
    /// Number of null-model rewirings.
    #[arg(long, default_value_t = 5)]
    pub seeds: usize,
    /// Write per-pair scores and features as CSV.
    #[arg(long)]
    pub dump_scores: bool,
    /// Worker threads; 0 lets the runtime decide.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

impl RunArgs {
    fn gap_threshold(&self) -> i64 {
        (self.gap_hours * SECONDS_PER_HOUR as f64).round() as i64
    }

    fn window_length(&self) -> i64 {
        self.window_days as i64 * SECONDS_PER_DAY
    }

    fn utc_offset_seconds(&self) -> i64 {
        (self.utc_offset * SECONDS_PER_HOUR as f64).round() as i64
    }

    fn snapshot_dir(&self) -> PathBuf {
        self.snapshots.clone().unwrap_or_else(|| self.out.join("snapshots"))
    }

    fn validate(&self) -> Result<()> {
        if self.slots != 24 && self.slots != 168 {
            bail!("--T must be 24 or 168, got {}", self.slots);
        }
        if self.window_days == 0 {
            bail!("--window-days must be positive");
        }
        if !(self.gap_hours > 0.0 && self.gap_hours.is_finite()) {
            bail!("--gap-hours must be positive");
        }
        if !self.beta.is_finite() || !self.utc_offset.is_finite() {
            bail!("--beta and --utc-offset must be finite");
        }
        if self.negative_ratio == 0 {
            bail!("--negative-ratio must be positive");
        }
        Ok(())
    }
}

/// Files and directories created by this run, removed on failure.
#[derive(Default)]
struct Outputs {
    files: Vec<PathBuf>,
    dirs: Vec<PathBuf>,
}

impl Outputs {
    fn dir(&mut self, dir: &Path) -> Result<()> {
        let mut missing = Vec::new();
        let mut p = Some(dir);
        while let Some(d) = p.filter(|d| !d.as_os_str().is_empty() && !d.exists()) {
            missing.push(d.to_path_buf());
            p = d.parent();
        }
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        if let Some(top) = missing.pop() {
            self.dirs.push(top);
        }
        Ok(())
    }

    fn file(&mut self, path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
        self.files.push(path.to_path_buf());
        fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
    }

    fn report(&mut self, path: &Path, run: &Value, body: Value) -> Result<()> {
        let mut doc = json!({ "run": run, "version": VERSION });
        if let (Some(d), Value::Object(b)) = (doc.as_object_mut(), body) {
            d.extend(b);
        }
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.file(path, text)
    }

    fn remove(&self) {
        for f in self.files.iter().rev() {
            let _ = fs::remove_file(f);
        }
        for d in self.dirs.iter().rev() {
            let _ = fs::remove_dir_all(d);
        }
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_from<I, T>(argv: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run(Cli::try_parse_from(argv)?.command)
}

pub fn run(command: Command) -> Result<()> {
    let args = command.args();
    args.validate()?;
    let mut outputs = Outputs::default();
    let result = if args.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build()?;
        pool.install(|| execute(&command, &mut outputs))
    } else {
        execute(&command, &mut outputs)
    };
    if result.is_err() {
        outputs.remove();
    }
    result
}

struct Inputs {
    registry: VenueRegistry,
    stream: CheckinStream,
}

fn load_inputs(args: &RunArgs) -> Result<Inputs> {
    let venues = args.venues.as_ref().context("missing --venues")?;
    let checkins = args.checkins.as_ref().context("missing --checkins")?;
    let registry = load_registry(venues).with_context(|| format!("loading venues {}", venues.display()))?;
    if registry.unknown_categories > 0 {
        log::warn!("{} venues with unknown categories mapped to other", registry.unknown_categories);
    }
    let stream =
        load_checkins(checkins, &registry).with_context(|| format!("loading check-ins {}", checkins.display()))?;
    if stream.dropped() > 0 {
        log::warn!("{} check-ins referencing unknown venues dropped", stream.dropped());
    }
    Ok(Inputs { registry, stream })
}

/// Start of the first window: the earliest check-in, floored to local
/// midnight.
fn first_midnight(stream: &CheckinStream, utc_offset: i64) -> Result<i64> {
    let (min, _) = stream.time_span().context("check-in stream is empty")?;
    Ok((min + utc_offset).div_euclid(SECONDS_PER_DAY) * SECONDS_PER_DAY - utc_offset)
}

fn execute(command: &Command, out: &mut Outputs) -> Result<()> {
    let args = command.args();
    let run = json!({ "subcommand": command.name(), "args": args });
    out.dir(&args.out)?;
    match command {
        Command::Generate(_) => {
            cmd_generate(args, &run, out)?;
        }
        Command::Snapshots(_) => {
            let inputs = load_inputs(args)?;
            cmd_snapshots(args, &run, &inputs, out)?;
        }
        Command::Stats(_) => {
            let inputs = load_inputs(args)?;
            cmd_stats(args, &run, &inputs, out)?;
        }
        Command::Dynamics(_) => {
            let inputs = load_inputs(args)?;
            cmd_dynamics(args, &run, &inputs, out)?;
        }
        Command::Evaluate(_) => {
            let inputs = load_inputs(args)?;
            cmd_evaluate(args, &run, &inputs, out)?;
        }
        Command::Pipeline(_) => {
            let inputs = if args.checkins.is_none() && args.venues.is_none() {
                cmd_generate(args, &run, out)?
            } else {
                load_inputs(args)?
            };
            cmd_snapshots(args, &run, &inputs, out)?;
            cmd_stats(args, &run, &inputs, out)?;
            cmd_dynamics(args, &run, &inputs, out)?;
            cmd_evaluate(args, &run, &inputs, out)?;
        }
    }
    Ok(())
}

fn city_config(args: &RunArgs) -> Result<CityConfig> {
    let mut config = match &args.config {
        Some(p) => CityConfig::from_file(p)?,
        None => CityConfig::default(),
    };
    config.seed = args.seed;
    config.utc_offset = args.utc_offset_seconds();
    for kv in &args.set {
        let (k, v) = kv.split_once('=').with_context(|| format!("--set expects KEY=VALUE, got `{kv}`"))?;
        config.set(k.trim(), v.trim()).map_err(anyhow::Error::msg)?;
    }
    config.validate()?;
    Ok(config)
}

fn cmd_generate(args: &RunArgs, run: &Value, out: &mut Outputs) -> Result<Inputs> {
    let config = city_config(args)?;
    let (registry, stream) = generate(&config)?;
    let venues = args.out.join("venues.csv");
    let checkins = args.out.join("checkins.jsonl");
    let mut buf = Vec::new();
    registry.write_csv(&mut buf)?;
    out.file(&venues, &buf)?;
    buf.clear();
    stream.write_jsonl(&registry, &mut buf)?;
    out.file(&checkins, &buf)?;
    out.report(
        &args.out.join("generate.json"),
        run,
        json!({ "city": config, "n_venues": registry.len(), "n_checkins": stream.len() }),
    )?;
    Ok(Inputs { registry, stream })
}

fn snapshots_of(args: &RunArgs, inputs: &Inputs) -> Result<(i64, Vec<PlaceGraph>)> {
    let t0 = first_midnight(&inputs.stream, args.utc_offset_seconds())?;
    let graphs = window_stream(&inputs.stream, args.gap_threshold(), args.window_length(), t0)?;
    Ok((t0, graphs))
}

fn cmd_snapshots(args: &RunArgs, run: &Value, inputs: &Inputs, out: &mut Outputs) -> Result<()> {
    let (t0, graphs) = snapshots_of(args, inputs)?;
    let dir = args.out.join("snapshots");
    out.dir(&dir)?;
    let mut summary = Vec::new();
    for (i, g) in graphs.iter().enumerate() {
        let stem = snapshot_stem(i);
        out.files.push(dir.join(format!("{stem}.tsv")));
        out.files.push(dir.join(format!("{stem}.json")));
        write_snapshot(g, i, &inputs.registry, &dir, &stem)?;
        summary.push(json!({
            "index": i,
            "window": g.window(),
            "n_nodes": g.node_count(),
            "n_edges": g.edge_count(),
            "total_weight": g.total_weight(),
        }));
    }
    out.report(&args.out.join("snapshots.json"), run, json!({ "t0": t0, "snapshots": summary }))
}

fn cmd_stats(args: &RunArgs, run: &Value, inputs: &Inputs, out: &mut Outputs) -> Result<()> {
    let (_, graphs) = snapshots_of(args, inputs)?;
    let opts = TopologyOptions {
        seed: args.seed,
        null_seeds: if args.null_model { args.seeds } else { 0 },
        ..TopologyOptions::default()
    };
    let mut per_snapshot = Vec::new();
    for (i, g) in graphs.iter().enumerate() {
        if g.is_empty() {
            per_snapshot.push(json!({ "index": i, "window": g.window(), "empty": true }));
            continue;
        }
        let topology = topology_report(g, &opts).with_context(|| format!("snapshot {i}"))?;
        let dists = degree_and_weight_distributions(g)?;
        let mut power_law = BTreeMap::new();
        for (name, h) in [
            ("in_degree", &dists.in_degree),
            ("out_degree", &dists.out_degree),
            ("degree", &dists.degree),
            ("weight", &dists.weight),
        ] {
            power_law.insert(name, fit_power_law(&h.samples(), None).ok());
        }
        let by_category: BTreeMap<&str, Option<f64>> = mean_weight(&category_weight_profile(g, &inputs.registry)?)
            .into_iter()
            .map(|(c, m)| (c.as_str(), m))
            .collect();
        let mut entry = serde_json::to_value(&topology)?;
        let extra = json!({
            "index": i,
            "window": g.window(),
            "empty": false,
            "distributions": dists,
            "power_law": power_law,
            "mean_weight_by_category": by_category,
        });
        if let (Value::Object(e), Value::Object(x)) = (&mut entry, extra) {
            e.extend(x);
        }
        per_snapshot.push(entry);
    }
    out.report(
        &args.out.join("stats.json"),
        run,
        json!({ "null_models": opts.null_seeds, "snapshots": per_snapshot }),
    )
}

fn cmd_dynamics(args: &RunArgs, run: &Value, inputs: &Inputs, out: &mut Outputs) -> Result<()> {
    let (t0, graphs) = snapshots_of(args, inputs)?;
    let dynamics = snapshot_dynamics(&graphs);
    let growth = growth_curve(&inputs.stream, args.gap_threshold(), t0);
    let fit = match &growth {
        Ok(g) => {
            out.file(&args.out.join("growth.csv"), g.to_csv())?;
            Some(g.fit.clone())
        }
        Err(e) => {
            log::warn!("densification fit skipped: {e}");
            None
        }
    };
    let (_, last) = inputs.stream.time_span().context("check-in stream is empty")?;
    let weeks = ((last - t0) / (7 * SECONDS_PER_DAY) + 1) as usize;
    let new_venues: Vec<Value> = (2..=weeks)
        .map(|w| new_venue_fraction(&inputs.stream, t0, w).map(|r| json!({ "week": w, "fraction": r })))
        .collect::<Result<_, _>>()?;
    out.report(
        &args.out.join("dynamics.json"),
        run,
        json!({
            "t0": t0,
            "snapshots": dynamics,
            "densification": fit,
            "growth_points": growth.as_ref().map_or(0, |g| g.points.len()),
            "new_venue_fraction": new_venues,
        }),
    )
}

fn cmd_evaluate(args: &RunArgs, run: &Value, inputs: &Inputs, out: &mut Outputs) -> Result<()> {
    let dir = args.snapshot_dir();
    if !dir.is_dir() {
        bail!("snapshot directory {} not found (run `snapshots` first)", dir.display());
    }
    let graphs = read_snapshot_dir(&dir, &inputs.registry).with_context(|| format!("reading {}", dir.display()))?;
    let transitions = extract_transitions(&inputs.stream, args.gap_threshold());
    let config = EvalConfig {
        candidates: CandidateOptions {
            mode: args.candidates,
            negative_ratio: args.negative_ratio,
            seed: args.seed,
            new_edges_only: args.new_edges_only,
        },
        slots: args.slots,
        beta: args.beta,
        utc_offset: args.utc_offset_seconds(),
        ..EvalConfig::default()
    };
    let evals = temporal_cross_validation(&inputs.stream, &transitions, &graphs, &inputs.registry, &config)?;
    if args.dump_scores {
        for e in &evals {
            let i = e.report.train_index;
            let mut buf = Vec::new();
            write_scores_csv(&mut buf, &inputs.registry, e)?;
            out.file(&args.out.join(format!("scores_{i:03}.csv")), &buf)?;
            let rows: Vec<_> = e.candidates.pairs.iter().copied().zip(e.features.iter().cloned()).collect();
            let mut buf = Vec::new();
            write_features_csv(&mut buf, &inputs.registry, &rows, Some(&e.candidates.labels))?;
            out.file(&args.out.join(format!("features_{i:03}.csv")), &buf)?;
        }
    }
    let reports: Vec<_> = evals.iter().map(|e| &e.report).collect();
    out.report(
        &args.out.join("evaluate.json"),
        run,
        json!({ "eval_config": config, "pairs": reports }),
    )
}
