//! `spectral-trace-lab`: run trace experiments from a TOML manifest.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical stage failure,
//! 3 `--check` violation.

// NaN must fail every tolerance check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cache;
mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::cache::SpectrumCache;
use crate::commands::Context;
use crate::config::ExperimentConfig;
use crate::error::LabError;
use crate::report::Output;

#[derive(Debug, Parser)]
#[command(name = "spectral-trace-lab", version, about = "Regularized trace experiments on Zoll surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gauss curvature on a grid and the Gauss–Bonnet check.
    Curvature(Common),
    /// Closure census over random starts and σ along one orbit.
    Geodesics(Common),
    /// Compute (or load) the clustered spectra.
    Spectrum(Common),
    /// Fit heat coefficients to the spectra and compare with zeta values.
    HeatFit(Common),
    /// Both sides of the trace identity with a full report.
    TraceVerify(Common),
    /// Round-sphere constants of the potential, computed two ways.
    Oracle(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment manifest.
    #[arg(long)]
    config: PathBuf,
    /// Exit with status 3 when a tolerance is violated.
    #[arg(long)]
    check: bool,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for randomized starts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

type Runner = fn(&mut Context) -> Result<(), LabError>;

fn run(cli: Cli) -> Result<(), LabError> {
    let (common, runner): (Common, Runner) = match cli.command {
        Command::Curvature(c) => (c, commands::curvature),
        Command::Geodesics(c) => (c, commands::geodesics),
        Command::Spectrum(c) => (c, commands::spectrum),
        Command::HeatFit(c) => (c, commands::heat_fit),
        Command::TraceVerify(c) => (c, commands::trace_verify),
        Command::Oracle(c) => (c, commands::oracle),
    };
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(LabError::Validation("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| LabError::Validation(e.to_string()))?;
    }
    let config = ExperimentConfig::load(&common.config)?;
    let metric = config.metric()?;
    let potential = config.potential()?;
    let out_dir = common.out.unwrap_or_else(|| config.output.dir.clone());
    let mut ctx = Context {
        out: Output::new(out_dir, config.output.json, config.output.csv),
        cache: SpectrumCache::new(config.output.cache_dir.clone()),
        config,
        metric,
        potential,
        check: common.check,
        seed: common.seed,
    };
    let result = runner(&mut ctx);
    for p in ctx.out.written() {
        eprintln!("wrote {}", p.display());
    }
    result
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
