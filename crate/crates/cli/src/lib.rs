//! Config-driven runner for the nullctl experiments.
//!
//! `nullctl <config.toml> [--check] [--out DIR] [--seed N]` reads one TOML
//! file, runs the experiment it names and writes `<name>.csv` and
//! `<name>.json` into the output directory.

pub mod config;
mod error;
mod experiments;
pub mod output;

use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;

pub use config::{Experiment, RunConfig};
pub use error::CliError;

/// Output-directory override, below `--out` and above the config.
pub const OUT_DIR_ENV: &str = "NULLCTL_OUT_DIR";

#[derive(Debug, Clone, Parser)]
#[command(name = "nullctl", version, about = "Run a null-control experiment described by a TOML file")]
pub struct Args {
    /// Run configuration.
    pub config: PathBuf,
    /// Exit with status 4 when the experiment's acceptance checks fail.
    #[arg(long)]
    pub check: bool,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for random centers and Monte Carlo paths.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub experiment: Experiment,
    pub files: Vec<PathBuf>,
    pub rows: usize,
    pub failures: Vec<String>,
}

#[derive(Serialize)]
struct Report<'a> {
    schema_version: &'static str,
    experiment: &'static str,
    seed: u64,
    checks: Checks<'a>,
    results: &'a serde_json::Value,
}

#[derive(Serialize)]
struct Checks<'a> {
    passed: bool,
    failures: &'a [String],
}

fn output_dir(args: &Args, configured: Option<&Path>) -> PathBuf {
    if let Some(dir) = &args.out {
        return dir.clone();
    }
    if let Some(dir) = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(dir);
    }
    configured.map_or_else(|| PathBuf::from("out"), Path::to_path_buf)
}

pub fn run(args: &Args) -> Result<RunSummary, CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| CliError::io(&args.config, e))?;
    let cfg = RunConfig::parse(&text)?;
    let (seed, output) = cfg.common();
    let seed = args.seed.or(*seed).unwrap_or(0);
    let dir = output_dir(args, output.dir.as_deref());
    let stem = output.name.clone().unwrap_or_else(|| cfg.experiment().name().to_string());
    if stem.is_empty() || stem.contains(['/', '\\']) {
        return Err(CliError::invalid("output.name", "must be a plain file stem"));
    }

    let outcome = experiments::run(&cfg, seed)?;
    let report = Report {
        schema_version: output::SCHEMA_VERSION,
        experiment: cfg.experiment().name(),
        seed,
        checks: Checks {
            passed: outcome.failures.is_empty(),
            failures: &outcome.failures,
        },
        results: &outcome.results,
    };
    let files = output::write_all_atomic(
        &dir,
        &[
            (format!("{stem}.csv"), outcome.table.to_bytes()),
            (format!("{stem}.json"), output::json_bytes(&report)),
        ],
    )?;
    let summary = RunSummary {
        experiment: cfg.experiment(),
        files,
        rows: outcome.table.len(),
        failures: outcome.failures,
    };
    if args.check && !summary.failures.is_empty() {
        return Err(CliError::Check(summary.failures));
    }
    Ok(summary)
}

/// Runs and reports, returning the process exit status.
pub fn main_with(args: &Args) -> i32 {
    match run(args) {
        Ok(s) => {
            let note = if s.failures.is_empty() { String::new() } else { format!(", {} check(s) failed", s.failures.len()) };
            println!("{}: {} rows written to {}{note}", s.experiment.name(), s.rows, s.files[0].display());
            0
        }
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            e.exit_code()
        }
    }
}
