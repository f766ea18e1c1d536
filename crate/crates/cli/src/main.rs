//! `spinbus` — batch front end for the spin-chain diagonalization library.
//!
//! Every subcommand reads a TOML or JSON config file, runs its pipeline and
//! writes plot-ready CSV/JSON artifacts plus a `manifest.json` that echoes
//! the fully resolved configuration. Re-running a subcommand with a previous
//! manifest as `--config` reproduces the data artifacts byte for byte.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use crate::output::Format;

/// Environment variable consulted for the worker thread count when the
/// `--threads` flag is absent.
pub const THREADS_ENV: &str = "SPINBUS_THREADS";

#[derive(Parser)]
#[command(
    name = "spinbus",
    version,
    about = "Exact diagonalization of disordered spin-1/2 Heisenberg chains \
             and the effective couplings they mediate between attached qubits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Energy levels of one system, optionally swept over the uniform field
    Spectrum(RunArgs),
    /// Local moments and effective probe-probe couplings of one system
    Effective(RunArgs),
    /// Disorder-ensemble statistics: samples, flip grids, sensitivity fits
    Ensemble(RunArgs),
    /// Finite-size sweeps of energy, gap and end moment, with fits
    Scaling(RunArgs),
    /// Exact versus effective-model comparison for probe qubits on a bus
    Validate(RunArgs),
}

impl Command {
    fn args(&self) -> &RunArgs {
        match self {
            Command::Spectrum(a)
            | Command::Effective(a)
            | Command::Ensemble(a)
            | Command::Scaling(a)
            | Command::Validate(a) => a,
        }
    }
}

#[derive(Args)]
pub struct RunArgs {
    /// Config file (.toml or .json); a previous run's manifest.json also works
    #[arg(long)]
    config: PathBuf,

    /// Output directory, created if missing
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Which artifact families to write
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,

    /// Worker threads (overrides SPINBUS_THREADS; default: all cores)
    #[arg(long)]
    threads: Option<usize>,

    /// Master seed; required for ensemble runs unless the config carries one
    #[arg(long)]
    seed: Option<u64>,
}

fn resolve_threads(flag: Option<usize>) -> anyhow::Result<Option<usize>> {
    if let Some(n) = flag {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(text) => {
            let n: usize = text
                .trim()
                .parse()
                .with_context(|| format!("{THREADS_ENV} must be a positive integer, got '{text}'"))?;
            if n == 0 {
                bail!("{THREADS_ENV} must be at least 1");
            }
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let args = cli.command.args();
    if let Some(n) = resolve_threads(args.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("failed to size the worker pool")?;
    }
    match &cli.command {
        Command::Spectrum(a) => commands::spectrum::run(a),
        Command::Effective(a) => commands::effective::run(a),
        Command::Ensemble(a) => commands::ensemble::run(a),
        Command::Scaling(a) => commands::scaling::run(a),
        Command::Validate(a) => commands::validate::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
