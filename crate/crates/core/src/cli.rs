//! Command-line front end: `compute-thresholds`, `simulate`, `compare`,
//! `verify`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{load_config, ExperimentConfig};
use crate::dp::compute_tables;
use crate::error::{Error, Result};
use crate::report;
use crate::sim::{run_campaign, summarize};
use crate::verify::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "txpolicy", version, about = "Optimal transmit/discard thresholds for energy-harvesting sensors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the threshold and expected-value tables as CSV.
    ComputeThresholds(CommonArgs),
    /// Run the Monte Carlo campaign and write one row per sensor run.
    Simulate(CommonArgs),
    /// Run the campaign and write per-(policy, N0) means and 95% intervals.
    Compare(CompareArgs),
    /// Check the recursion against the brute-force oracle and closed forms.
    Verify(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON configuration; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads, 0 = one per core.
    #[arg(long, env = "TXPOLICY_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also write the summary as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

fn resolve(args: &CommonArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::try_from(crate::config::ConfigFile::default())?,
    };
    if let Some(seed) = args.seed {
        cfg.set_seed(seed);
    }
    if let Some(threads) = args.threads {
        cfg.set_threads(threads);
    }
    Ok(cfg)
}

fn out_path<'a>(args: &'a CommonArgs, default: &'static str) -> &'a Path {
    args.out.as_deref().unwrap_or(Path::new(default))
}

/// Run a parsed command and return the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Invalid { .. } | Error::Parse { .. } => EXIT_VALIDATION,
                _ => EXIT_FAILURE,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::ComputeThresholds(args) => {
            let cfg = resolve(&args)?;
            let tables = compute_tables(cfg.dp())?;
            let rows = report::threshold_rows(&tables)?;
            let out = out_path(&args, "thresholds.csv");
            report::emit_csv(&report::threshold_csv(&rows), out)?;
            eprintln!("wrote {} cells to {}", rows.len(), out.display());
        }
        Command::Simulate(args) => {
            let cfg = resolve(&args)?;
            let outcomes = run_campaign(&cfg.sim)?;
            let out = out_path(&args, "results.csv");
            report::emit_csv(&report::outcome_csv(&outcomes), out)?;
            eprintln!("wrote {} runs to {}", outcomes.len(), out.display());
        }
        Command::Compare(args) => {
            let cfg = resolve(&args.common)?;
            let summary = summarize(&run_campaign(&cfg.sim)?);
            let out = out_path(&args.common, "summary.csv");
            report::emit_csv(&report::summary_csv(&summary), out)?;
            if let Some(json) = &args.json {
                report::emit_json(&summary, json)?;
            }
            eprintln!("wrote {} summary rows to {}", summary.len(), out.display());
        }
        Command::Verify(args) => {
            let cfg = resolve(&args)?;
            let result = verify(&cfg)?;
            let text = result.render();
            print!("{text}");
            if let Some(out) = &args.out {
                std::fs::write(out, &text).map_err(|e| Error::io(out, e))?;
            }
            if !result.passed() {
                return Ok(EXIT_VERIFICATION);
            }
        }
    }
    Ok(EXIT_OK)
}
