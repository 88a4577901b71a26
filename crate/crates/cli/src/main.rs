//! `vacuumfront`: profiles, ODE families, simulations and the acceptance suite
//! from the command line.
//!
//! Exit codes: 0 success, 1 numerical abort or failed verification, 2
//! configuration error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod csv;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use vacuumfront::acceptance::Fault;

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical abort: {0}")]
    Numerical(vacuumfront::Error),
    #[error("cannot write {0}: {1}")]
    Io(String, std::io::Error),
}

impl From<vacuumfront::Error> for CliError {
    fn from(e: vacuumfront::Error) -> Self {
        match e {
            vacuumfront::Error::InvalidInput(msg) => CliError::Config(msg),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(..) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "vacuumfront", version, about = "Barenblatt asymptotics of damped Euler flow with a physical vacuum")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Inject a known defect (perturb-b) to check that verification fails.
    #[arg(long, global = true)]
    seed_fault: Option<String>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Sampled Barenblatt profile and its constants.
    Barenblatt,
    /// Affine family started from the Barenblatt coefficients.
    Affine,
    /// Boundary correction h(t) and its decay rate.
    Correction,
    /// Lagrangian free-boundary run with diagnostics.
    Simulate,
    /// Run the acceptance suite.
    Verify,
    /// Fitted decay exponents of a run and of the correction.
    Rates,
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("VACUUMFRONT_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("VACUUMFRONT_THREADS must be a positive integer, got '{v}'"))),
        },
    }
}

fn load(cli: &Cli) -> Result<(RunConfig, PathBuf, Option<Fault>), CliError> {
    let cfg = match &cli.config {
        None => RunConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
    };
    let out = cli.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    let fault = cli
        .seed_fault
        .as_deref()
        .map(str::parse::<Fault>)
        .transpose()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok((cfg, out, fault))
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let (cfg, out, fault) = load(cli)?;
    if fault.is_some() && !matches!(cli.command, Command::Verify | Command::Barenblatt) {
        return Err(CliError::Config("--seed-fault applies to verify and barenblatt only".into()));
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker threads: {e}")))?;
    pool.install(|| match cli.command {
        Command::Barenblatt => commands::barenblatt(&cfg, &out, fault).map(|_| true),
        Command::Affine => commands::affine(&cfg, &out).map(|_| true),
        Command::Correction => commands::correction(&cfg, &out).map(|_| true),
        Command::Simulate => commands::simulate(&cfg, &out).map(|_| true),
        Command::Rates => commands::rates(&cfg, &out).map(|_| true),
        Command::Verify => {
            let started = Instant::now();
            let results = commands::verify(fault);
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!(
                "{} of {} criteria passed in {:.1?}",
                results.len() - failed,
                results.len(),
                started.elapsed()
            );
            Ok(failed == 0)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("vacuumfront: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
