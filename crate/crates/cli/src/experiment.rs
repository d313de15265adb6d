//! Sweep runner and report writer: runs the selected control policies
//! over a grid of incumbent pointing angles, antenna configurations, and
//! weather snapshots, then writes machine-readable reports.
//!
//! Outputs under the chosen directory:
//!   results.csv   one row per policy and sweep point (stable bytes)
//!   results.json  the same rows as JSON
//!   timings.csv   wall-clock runtimes (excluded from byte stability)
//!   decisions/    one JSON file per successful decision
//!
//! A failing sweep point only poisons its own rows; its error lands in
//! the `error` column and the run carries on.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use coex_core::context::{
    load_weather_snapshot, select_interference_threshold, ThresholdPolicy, WeatherContext,
};
use coex_core::control::{
    baseline_exclusion_zone, baseline_in_threshold, brute_force_control, cat3s_control,
    ControlDecision, EXCLUSION_ZONE_RADIUS_M, PER_BS_THRESHOLD_DB,
};
use coex_core::link::Evaluator;
use coex_core::scenario::{generate_scenario, ArrayConfig, GeneratorParams, Scenario};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::files::{self, FileError};

/// Results schema version written as the first line of results.csv.
pub const RESULTS_CSV_VERSION: &str = "# coex-results v1";
/// Comparison schema version written by `compare` when saving CSV.
pub const COMPARE_CSV_VERSION: &str = "# coex-compare v1";
const RESULTS_HEADER: [&str; 10] = [
    "policy",
    "elevation_deg",
    "array",
    "weather",
    "i_th_db",
    "aggregate_in_db",
    "active_bs_count",
    "total_capacity_bps_hz",
    "served_ues",
    "error",
];

/// Rain rate backing the builtin rainy snapshot, mm/h. A moderate daily
/// rate; heavier rain is available through "builtin:rain:<mm_h>".
pub const BUILTIN_RAIN_MM_H: f64 = 8.0;

/// Generator seed used when a config or the CLI does not name one.
pub const DEFAULT_SEED: u64 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    Cat3s,
    Baseline1,
    Baseline2,
    Brute,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::Cat3s => "cat3s",
            Policy::Baseline1 => "baseline1",
            Policy::Baseline2 => "baseline2",
            Policy::Brute => "brute",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where the swept scenario comes from: a file, or the generator with
/// explicit parameters and seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioSource {
    File(PathBuf),
    Generate {
        #[serde(default)]
        params: GeneratorParams,
        #[serde(default = "default_seed")]
        seed: u64,
    },
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl Default for ScenarioSource {
    fn default() -> Self {
        ScenarioSource::Generate {
            params: GeneratorParams::default(),
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSource,
    /// Policies to run at every sweep point; must be non-empty.
    pub policies: Vec<Policy>,
    /// Incumbent dish elevation angles to sweep, degrees.
    pub elevation_deg: Vec<f64>,
    /// Antenna configurations to sweep; empty means the scenario's own.
    pub array_configs: Vec<ArrayConfig>,
    /// Weather snapshots: "builtin:sunny", "builtin:rainy",
    /// "builtin:rain:<mm_h>", or a snapshot file path.
    pub weather: Vec<String>,
    pub thresholds: ThresholdPolicy,
    pub exclusion_zone_radius_m: f64,
    pub per_bs_threshold_db: f64,
    /// Enumeration cap for the brute policy; None uses the library cap.
    pub brute_cap: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario: ScenarioSource::default(),
            policies: vec![Policy::Cat3s, Policy::Baseline1, Policy::Baseline2],
            elevation_deg: vec![20.0, 30.0, 40.0, 50.0],
            array_configs: Vec::new(),
            weather: vec![String::from("builtin:sunny"), String::from("builtin:rainy")],
            thresholds: ThresholdPolicy::default(),
            exclusion_zone_radius_m: EXCLUSION_ZONE_RADIUS_M,
            per_bs_threshold_db: PER_BS_THRESHOLD_DB,
            brute_cap: None,
        }
    }
}

impl ExperimentConfig {
    pub fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.policies.is_empty() {
            out.push(String::from("policies: must list at least one policy"));
        }
        if self.elevation_deg.is_empty() {
            out.push(String::from("elevation_deg: sweep list must be non-empty"));
        }
        if self.weather.is_empty() {
            out.push(String::from("weather: sweep list must be non-empty"));
        }
        for (i, e) in self.elevation_deg.iter().enumerate() {
            if !(e.is_finite() && (0.0..=90.0).contains(e)) {
                out.push(format!("elevation_deg[{i}]: {e} outside [0, 90]"));
            }
        }
        out
    }
}

/// One output row: a policy's summary at one sweep point. Metric fields
/// are empty when `error` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub policy: String,
    pub elevation_deg: f64,
    pub array: String,
    pub weather: String,
    pub i_th_db: Option<f64>,
    pub aggregate_in_db: Option<f64>,
    pub active_bs_count: Option<u32>,
    pub total_capacity_bps_hz: Option<f64>,
    pub served_ues: Option<u32>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
struct TimingRow {
    policy: String,
    elevation_deg: f64,
    array: String,
    weather: String,
    runtime_ms: f64,
}

/// Full record persisted per successful decision.
#[derive(Debug, Clone, Serialize)]
struct DecisionRecord<'a> {
    policy: &'a str,
    elevation_deg: f64,
    array: &'a str,
    weather: &'a str,
    i_th_db: f64,
    decision: &'a ControlDecision,
}

#[derive(Debug)]
pub enum ExperimentError {
    /// Bad configuration or unresolvable scenario; CLI exit code 2.
    Config(String),
    /// Failure writing reports; CLI exit code 1.
    Io { path: String, source: io::Error },
}

impl fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExperimentError::Config(msg) => write!(f, "configuration error: {msg}"),
            ExperimentError::Io { path, source } => write!(f, "{path}: {source}"),
        }
    }
}

impl std::error::Error for ExperimentError {}

impl From<FileError> for ExperimentError {
    fn from(e: FileError) -> Self {
        ExperimentError::Config(e.to_string())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions<'a> {
    pub out_dir: &'a Path,
    /// Overrides the generator seed of a `generate` scenario source.
    pub seed: Option<u64>,
    /// Worker threads for the sweep; None or Some(0) picks the default.
    pub workers: Option<usize>,
}

impl<'a> RunOptions<'a> {
    pub fn new(out_dir: &'a Path) -> Self {
        RunOptions {
            out_dir,
            seed: None,
            workers: None,
        }
    }
}

pub struct RunSummary {
    pub rows: Vec<ResultRow>,
    pub total_points: usize,
    pub failed_points: usize,
}

/// Report label of a weather source: builtin names keep their tail,
/// file paths reduce to the stem, and rates swap dots for dashes.
pub fn weather_label(source: &str) -> String {
    let raw = if let Some(rest) = source.strip_prefix("builtin:") {
        rest.to_string()
    } else {
        Path::new(source)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| source.to_string())
    };
    let mut label: String = raw
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
        .collect();
    if label.is_empty() {
        label.push_str("weather");
    }
    label
}

fn resolve_weather(source: &str) -> Result<WeatherContext, String> {
    if let Some(rest) = source.strip_prefix("builtin:") {
        return match rest {
            "sunny" => Ok(WeatherContext::from_rain_rate(0.0, 0)),
            "rainy" => Ok(WeatherContext::from_rain_rate(BUILTIN_RAIN_MM_H, 0)),
            other => match other.strip_prefix("rain:").map(str::parse::<f64>) {
                Some(Ok(rate)) if rate.is_finite() && rate >= 0.0 => {
                    Ok(WeatherContext::from_rain_rate(rate, 0))
                }
                _ => Err(format!("unknown builtin weather {source:?}")),
            },
        };
    }
    let bytes = fs::read(source).map_err(|e| format!("{source}: {e}"))?;
    load_weather_snapshot(&bytes).map_err(|e| format!("{source}: {e}"))
}

fn number_slug(v: f64) -> String {
    format!("{v}").replace('-', "m").replace('.', "p")
}

struct PointOutput {
    rows: Vec<ResultRow>,
    timings: Vec<TimingRow>,
    decisions: Vec<(String, Vec<u8>)>,
}

impl PointOutput {
    /// A point counts as failed only when every policy row errored.
    fn failed(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.error.is_some())
    }
}

struct SweepPoint<'a> {
    elevation_deg: f64,
    array: &'a ArrayConfig,
    array_label: String,
    weather_source: &'a str,
    weather_label: String,
}

fn run_point(
    base: &Scenario,
    cfg: &ExperimentConfig,
    point: &SweepPoint<'_>,
) -> PointOutput {
    let mut rows = Vec::with_capacity(cfg.policies.len());
    let mut timings = Vec::new();
    let mut decisions = Vec::new();

    let blank_row = |policy: Policy| ResultRow {
        policy: policy.name().to_string(),
        elevation_deg: point.elevation_deg,
        array: point.array_label.clone(),
        weather: point.weather_label.clone(),
        i_th_db: None,
        aggregate_in_db: None,
        active_bs_count: None,
        total_capacity_bps_hz: None,
        served_ues: None,
        error: None,
    };

    let mut scenario = base.clone();
    scenario.fss.elevation_deg = point.elevation_deg;
    scenario.antenna = point.array.clone();

    let prepared = resolve_weather(point.weather_source).and_then(|weather| {
        let i_th_db = select_interference_threshold(&weather, &cfg.thresholds);
        Evaluator::new(&scenario, weather)
            .map(|eval| (eval, i_th_db))
            .map_err(|e| e.to_string())
    });
    let (eval, i_th_db) = match prepared {
        Ok(v) => v,
        Err(message) => {
            for &policy in &cfg.policies {
                let mut row = blank_row(policy);
                row.error = Some(message.clone());
                rows.push(row);
            }
            return PointOutput {
                rows,
                timings,
                decisions,
            };
        }
    };

    for &policy in &cfg.policies {
        let started = Instant::now();
        let outcome: Result<ControlDecision, String> = match policy {
            Policy::Cat3s => Ok(cat3s_control(&eval, i_th_db)),
            Policy::Baseline1 => Ok(baseline_exclusion_zone(
                &eval,
                i_th_db,
                cfg.exclusion_zone_radius_m,
            )),
            Policy::Baseline2 => Ok(baseline_in_threshold(&eval, cfg.per_bs_threshold_db)),
            Policy::Brute => {
                brute_force_control(&eval, i_th_db, cfg.brute_cap).map_err(|e| e.to_string())
            }
        };
        let runtime_ms = started.elapsed().as_secs_f64() * 1e3;
        timings.push(TimingRow {
            policy: policy.name().to_string(),
            elevation_deg: point.elevation_deg,
            array: point.array_label.clone(),
            weather: point.weather_label.clone(),
            runtime_ms,
        });

        let mut row = blank_row(policy);
        row.i_th_db = Some(i_th_db);
        match outcome {
            Ok(decision) => {
                row.aggregate_in_db = Some(decision.achieved_in_db);
                row.active_bs_count = Some(decision.state.active_bs_count());
                row.total_capacity_bps_hz = Some(decision.total_capacity_bps_hz);
                row.served_ues = Some(decision.served_ues);
                let record = DecisionRecord {
                    policy: policy.name(),
                    elevation_deg: point.elevation_deg,
                    array: &point.array_label,
                    weather: &point.weather_label,
                    i_th_db,
                    decision: &decision,
                };
                let name = format!(
                    "{}-elev{}-{}-{}.json",
                    policy.name(),
                    number_slug(point.elevation_deg),
                    point.array_label,
                    point.weather_label
                );
                let mut bytes =
                    serde_json::to_vec_pretty(&record).expect("decision serializes");
                bytes.push(b'\n');
                decisions.push((name, bytes));
            }
            Err(message) => {
                row.error = Some(message);
            }
        }
        rows.push(row);
    }

    PointOutput {
        rows,
        timings,
        decisions,
    }
}

fn write_rows_csv(path: &Path, version: &str, header: &[&str], lines: &[Vec<String>]) -> Result<(), ExperimentError> {
    let io_err = |source: io::Error| ExperimentError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(version.as_bytes());
    buf.push(b'\n');
    {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        writer.write_record(header).map_err(csv_io_err(path))?;
        for line in lines {
            writer.write_record(line).map_err(csv_io_err(path))?;
        }
        writer.flush().map_err(io_err)?;
    }
    fs::write(path, buf).map_err(io_err)
}

fn csv_io_err(path: &Path) -> impl Fn(csv::Error) -> ExperimentError + '_ {
    move |e| ExperimentError::Io {
        path: path.display().to_string(),
        source: io::Error::other(e.to_string()),
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn fmt_opt_u32(v: Option<u32>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn result_fields(r: &ResultRow) -> Vec<String> {
    vec![
        r.policy.clone(),
        fmt_f64(r.elevation_deg),
        r.array.clone(),
        r.weather.clone(),
        fmt_opt_f64(r.i_th_db),
        fmt_opt_f64(r.aggregate_in_db),
        fmt_opt_u32(r.active_bs_count),
        fmt_opt_f64(r.total_capacity_bps_hz),
        fmt_opt_u32(r.served_ues),
        r.error.clone().unwrap_or_default(),
    ]
}

/// Resolves the scenario named by the config (applying a seed override
/// to generated ones) without running anything.
pub fn resolve_scenario(
    cfg: &ExperimentConfig,
    seed_override: Option<u64>,
) -> Result<Scenario, ExperimentError> {
    match &cfg.scenario {
        ScenarioSource::File(path) => Ok(files::load_scenario(path)?),
        ScenarioSource::Generate { params, seed } => {
            let seed = seed_override.unwrap_or(*seed);
            generate_scenario(params, seed)
                .map_err(|e| ExperimentError::Config(format!("scenario generation: {e}")))
        }
    }
}

/// Runs the full sweep and writes all reports under `opts.out_dir`.
/// Identical config and seed produce byte-identical results.csv and
/// results.json regardless of worker count.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    opts: &RunOptions<'_>,
) -> Result<RunSummary, ExperimentError> {
    let issues = cfg.issues();
    if !issues.is_empty() {
        return Err(ExperimentError::Config(issues.join("; ")));
    }
    let base = resolve_scenario(cfg, opts.seed)?;

    let own_array = [base.antenna.clone()];
    let arrays: &[ArrayConfig] = if cfg.array_configs.is_empty() {
        &own_array
    } else {
        &cfg.array_configs
    };

    let mut points = Vec::new();
    for &elevation_deg in &cfg.elevation_deg {
        for array in arrays {
            for weather_source in &cfg.weather {
                points.push(SweepPoint {
                    elevation_deg,
                    array,
                    array_label: array.label(),
                    weather_source,
                    weather_label: weather_label(weather_source),
                });
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.unwrap_or(0))
        .build()
        .map_err(|e| ExperimentError::Config(format!("worker pool: {e}")))?;
    let outputs: Vec<PointOutput> =
        pool.install(|| points.par_iter().map(|p| run_point(&base, cfg, p)).collect());

    let decisions_dir = opts.out_dir.join("decisions");
    fs::create_dir_all(&decisions_dir).map_err(|source| ExperimentError::Io {
        path: decisions_dir.display().to_string(),
        source,
    })?;

    let mut rows = Vec::new();
    let mut timing_lines = Vec::new();
    let mut failed_points = 0usize;
    for output in &outputs {
        rows.extend(output.rows.iter().cloned());
        for t in &output.timings {
            timing_lines.push(vec![
                t.policy.clone(),
                fmt_f64(t.elevation_deg),
                t.array.clone(),
                t.weather.clone(),
                fmt_f64(t.runtime_ms),
            ]);
        }
        if output.failed() {
            failed_points += 1;
        }
        for (name, bytes) in &output.decisions {
            let path = decisions_dir.join(name);
            fs::write(&path, bytes).map_err(|source| ExperimentError::Io {
                path: path.display().to_string(),
                source,
            })?;
        }
    }

    let result_lines: Vec<Vec<String>> = rows.iter().map(result_fields).collect();
    write_rows_csv(
        &opts.out_dir.join("results.csv"),
        RESULTS_CSV_VERSION,
        &RESULTS_HEADER,
        &result_lines,
    )?;
    files::write_json_pretty(&opts.out_dir.join("results.json"), &rows)
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    write_rows_csv(
        &opts.out_dir.join("timings.csv"),
        "# coex-timings v1",
        &["policy", "elevation_deg", "array", "weather", "runtime_ms"],
        &timing_lines,
    )?;

    Ok(RunSummary {
        rows,
        total_points: points.len(),
        failed_points,
    })
}

#[derive(Debug)]
pub enum CompareError {
    /// Malformed results file; carries the 1-based line number.
    Parse { line: usize, message: String },
}

impl fmt::Display for CompareError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompareError::Parse { line, message } => {
                write!(f, "results line {line}: {message}")
            }
        }
    }
}

impl std::error::Error for CompareError {}

/// One policy's deltas against cat3s at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub elevation_deg: String,
    pub array: String,
    pub weather: String,
    pub policy: String,
    pub d_aggregate_in_db: f64,
    pub d_active_bs_count: f64,
    pub d_total_capacity_bps_hz: f64,
    /// True when the cat3s row at this point exceeds its threshold.
    pub cat3s_violation: bool,
}

#[derive(Debug, Default)]
pub struct Comparison {
    pub rows: Vec<CompareRow>,
    /// Sweep points whose cat3s row exceeds its own threshold.
    pub violations: Vec<String>,
}

struct ParsedResult {
    policy: String,
    elevation_deg: String,
    array: String,
    weather: String,
    i_th_db: Option<f64>,
    aggregate_in_db: Option<f64>,
    active_bs_count: Option<f64>,
    total_capacity_bps_hz: Option<f64>,
    error: Option<String>,
}

fn parse_result_line(line: usize, text: &str) -> Result<ParsedResult, CompareError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut record = csv::StringRecord::new();
    let read = reader
        .read_record(&mut record)
        .map_err(|e| CompareError::Parse {
            line,
            message: e.to_string(),
        })?;
    if !read || record.len() != RESULTS_HEADER.len() {
        return Err(CompareError::Parse {
            line,
            message: format!(
                "expected {} fields, found {}",
                RESULTS_HEADER.len(),
                record.len()
            ),
        });
    }
    let opt_f64 = |idx: usize, name: &str| -> Result<Option<f64>, CompareError> {
        let field = record.get(idx).unwrap_or("");
        if field.is_empty() {
            return Ok(None);
        }
        field
            .parse::<f64>()
            .map(Some)
            .map_err(|_| CompareError::Parse {
                line,
                message: format!("bad {name} value {field:?}"),
            })
    };
    let error = record.get(9).unwrap_or("");
    Ok(ParsedResult {
        policy: record.get(0).unwrap_or("").to_string(),
        elevation_deg: record.get(1).unwrap_or("").to_string(),
        array: record.get(2).unwrap_or("").to_string(),
        weather: record.get(3).unwrap_or("").to_string(),
        i_th_db: opt_f64(4, "i_th_db")?,
        aggregate_in_db: opt_f64(5, "aggregate_in_db")?,
        active_bs_count: opt_f64(6, "active_bs_count")?,
        total_capacity_bps_hz: opt_f64(7, "total_capacity_bps_hz")?,
        error: if error.is_empty() {
            None
        } else {
            Some(error.to_string())
        },
    })
}

/// Tabulates each policy's metric deltas against cat3s per sweep point
/// and flags points where cat3s exceeded its own threshold. Points or
/// rows carrying errors contribute no deltas.
pub fn compare_policies(results_csv: &str) -> Result<Comparison, CompareError> {
    let mut parsed: Vec<ParsedResult> = Vec::new();
    let mut seen_header = false;
    for (i, raw) in results_csv.lines().enumerate() {
        let line = i + 1;
        let text = raw.trim_end_matches('\r');
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        if !seen_header {
            let expected = RESULTS_HEADER.join(",");
            if text != expected {
                return Err(CompareError::Parse {
                    line,
                    message: format!("unexpected header {text:?}"),
                });
            }
            seen_header = true;
            continue;
        }
        parsed.push(parse_result_line(line, text)?);
    }

    let mut keys: Vec<(String, String, String)> = Vec::new();
    for r in &parsed {
        let key = (
            r.elevation_deg.clone(),
            r.array.clone(),
            r.weather.clone(),
        );
        if !keys.contains(&key) {
            keys.push(key);
        }
    }

    let mut comparison = Comparison::default();
    for key in &keys {
        let at_point: Vec<&ParsedResult> = parsed
            .iter()
            .filter(|r| {
                (&r.elevation_deg, &r.array, &r.weather) == (&key.0, &key.1, &key.2)
            })
            .collect();
        let reference = at_point
            .iter()
            .find(|r| r.policy == Policy::Cat3s.name() && r.error.is_none());
        let Some(reference) = reference else {
            continue;
        };
        let point_label = format!("elev {} array {} weather {}", key.0, key.1, key.2);
        let violation = match (reference.aggregate_in_db, reference.i_th_db) {
            (Some(agg), Some(th)) => agg > th,
            _ => false,
        };
        if violation {
            comparison.violations.push(point_label);
        }
        for other in &at_point {
            if other.policy == reference.policy || other.error.is_some() {
                continue;
            }
            let delta = |a: Option<f64>, b: Option<f64>| match (a, b) {
                (Some(x), Some(y)) => x - y,
                _ => f64::NAN,
            };
            comparison.rows.push(CompareRow {
                elevation_deg: key.0.clone(),
                array: key.1.clone(),
                weather: key.2.clone(),
                policy: other.policy.clone(),
                d_aggregate_in_db: delta(other.aggregate_in_db, reference.aggregate_in_db),
                d_active_bs_count: delta(other.active_bs_count, reference.active_bs_count),
                d_total_capacity_bps_hz: delta(
                    other.total_capacity_bps_hz,
                    reference.total_capacity_bps_hz,
                ),
                cat3s_violation: violation,
            });
        }
    }
    Ok(comparison)
}

/// Renders the comparison as a CSV document (with version header), the
/// same layout `compare --out` writes.
pub fn comparison_to_csv(cmp: &Comparison) -> String {
    let mut out = String::from(COMPARE_CSV_VERSION);
    out.push('\n');
    out.push_str(
        "elevation_deg,array,weather,policy,d_aggregate_in_db,d_active_bs_count,d_total_capacity_bps_hz,cat3s_violation\n",
    );
    for r in &cmp.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.elevation_deg,
            r.array,
            r.weather,
            r.policy,
            r.d_aggregate_in_db,
            r.d_active_bs_count,
            r.d_total_capacity_bps_hz,
            r.cat3s_violation
        ));
    }
    out
}
