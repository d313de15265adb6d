//! `coex`: generate synthetic scenarios, run policy sweeps, and compare
//! policy results.
//!
//! Exit codes: 0 on success, 1 when every sweep point failed (or reports
//! could not be written), 2 on configuration errors.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coex_cli::experiment::{
    compare_policies, comparison_to_csv, run_experiment, Comparison, ExperimentConfig,
    ExperimentError, RunOptions, DEFAULT_SEED,
};
use coex_cli::files;
use coex_core::scenario::{generate_scenario, validate_scenario};

#[derive(Parser)]
#[command(name = "coex", version, about = "Spectrum-coexistence scenario and policy sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic scenario file.
    Generate {
        /// Generator parameter file (JSON); defaults apply when absent.
        #[arg(long, env = "COEX_CONFIG")]
        config: Option<PathBuf>,
        #[arg(long, env = "COEX_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Output scenario file.
        #[arg(long, env = "COEX_OUT", default_value = "scenario.json")]
        out: PathBuf,
    },
    /// Run a policy sweep from an experiment configuration.
    Run {
        /// Experiment configuration file (JSON).
        #[arg(long, env = "COEX_CONFIG")]
        config: PathBuf,
        /// Overrides the seed of a generated scenario source.
        #[arg(long, env = "COEX_SEED")]
        seed: Option<u64>,
        /// Output directory for reports.
        #[arg(long, env = "COEX_OUT", default_value = "out")]
        out: PathBuf,
        /// Worker threads; 0 or absent picks the runtime default.
        #[arg(long, env = "COEX_WORKERS")]
        workers: Option<usize>,
    },
    /// Summarize a results.csv: per-point deltas of each policy vs cat3s.
    Compare {
        /// results.csv produced by `run`.
        results: PathBuf,
        /// Optional CSV output; stdout gets a table either way.
        #[arg(long, env = "COEX_OUT")]
        out: Option<PathBuf>,
    },
}

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Generate { config, seed, out } => generate(config, seed, out),
        Command::Run {
            config,
            seed,
            out,
            workers,
        } => run(config, seed, out, workers),
        Command::Compare { results, out } => compare(results, out),
    }
}

fn generate(config: Option<PathBuf>, seed: u64, out: PathBuf) -> ExitCode {
    let params = match files::load_generator_params(config.as_deref()) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("coex generate: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let scenario = match generate_scenario(&params, seed) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("coex generate: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let report = validate_scenario(&scenario);
    if !report.is_ok() {
        eprintln!("coex generate: generated scenario fails validation (internal error)");
        for v in &report.violations {
            eprintln!("  {}: {}", v.path, v.message);
        }
        return ExitCode::from(EXIT_FAILURE);
    }
    if let Err(e) = files::save_scenario(&out, &scenario) {
        eprintln!("coex generate: {e}");
        return ExitCode::from(EXIT_FAILURE);
    }
    let ues: usize = scenario
        .base_stations
        .iter()
        .flat_map(|b| &b.sectors)
        .map(|s| s.ues.len())
        .sum();
    // Best-effort status: a reader that hung up must not panic the command
    // after its work is done.
    let _ = writeln!(
        io::stdout(),
        "wrote {} ({} stations, {} UEs, {} buildings, seed {})",
        out.display(),
        scenario.base_stations.len(),
        ues,
        scenario.buildings.len(),
        seed
    );
    ExitCode::SUCCESS
}

fn run(config: PathBuf, seed: Option<u64>, out: PathBuf, workers: Option<usize>) -> ExitCode {
    let cfg: ExperimentConfig = match files::read_json(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("coex run: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let opts = RunOptions {
        out_dir: &out,
        seed,
        workers,
    };
    match run_experiment(&cfg, &opts) {
        Ok(summary) => {
            let _ = writeln!(
                io::stdout(),
                "wrote {} rows over {} sweep points to {} ({} failed)",
                summary.rows.len(),
                summary.total_points,
                out.display(),
                summary.failed_points
            );
            if summary.total_points > 0 && summary.failed_points == summary.total_points {
                eprintln!("coex run: every sweep point failed");
                return ExitCode::from(EXIT_FAILURE);
            }
            ExitCode::SUCCESS
        }
        Err(ExperimentError::Config(msg)) => {
            eprintln!("coex run: configuration error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("coex run: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn compare(results: PathBuf, out: Option<PathBuf>) -> ExitCode {
    let text = match fs::read_to_string(&results) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("coex compare: {}: {e}", results.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let cmp = match compare_policies(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("coex compare: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let table = print_table(&cmp);
    if let Some(path) = out {
        if let Err(e) = fs::write(&path, comparison_to_csv(&cmp)) {
            eprintln!("coex compare: {}: {e}", path.display());
            return ExitCode::from(EXIT_FAILURE);
        }
    }
    match table {
        Ok(()) => ExitCode::SUCCESS,
        // The reader hung up (e.g. piped into `head`); the table they asked
        // for was delivered as far as they wanted it.
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("coex compare: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn print_table(cmp: &Comparison) -> io::Result<()> {
    let mut w = io::stdout().lock();
    writeln!(
        w,
        "{:<10} {:<6} {:<8} {:<10} {:>12} {:>9} {:>14} {:>9}",
        "policy", "elev", "array", "weather", "d_I/N_dB", "d_active", "d_capacity", "violation"
    )?;
    for r in &cmp.rows {
        writeln!(
            w,
            "{:<10} {:<6} {:<8} {:<10} {:>12.3} {:>9} {:>14.3} {:>9}",
            r.policy,
            r.elevation_deg,
            r.array,
            r.weather,
            r.d_aggregate_in_db,
            r.d_active_bs_count,
            r.d_total_capacity_bps_hz,
            r.cat3s_violation
        )?;
    }
    if !cmp.violations.is_empty() {
        writeln!(w, "cat3s threshold violations:")?;
        for v in &cmp.violations {
            writeln!(w, "  {v}")?;
        }
    }
    Ok(())
}
