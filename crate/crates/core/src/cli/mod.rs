//! Command-line front end.

mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::continuum::ContinuumError;
use crate::estimation::EstimationError;
use crate::quantum_stats::StatsError;
use crate::tmm::TmmError;

pub use config::{Grid, PhasePolicy, RunConfig};

/// Environment variable holding the worker count for grid sweeps.
pub const WORKERS_ENV: &str = "HOMSENSE_WORKERS";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Calibration(String),
    #[error("physics error: {0}")]
    Physics(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Calibration(_) => 2,
            _ => 1,
        }
    }
}

impl From<TmmError> for CliError {
    fn from(e: TmmError) -> Self {
        match e {
            TmmError::CalibrationFailure { .. } => CliError::Calibration(e.to_string()),
            other => CliError::Physics(other.to_string()),
        }
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        CliError::Physics(e.to_string())
    }
}

impl From<EstimationError> for CliError {
    fn from(e: EstimationError) -> Self {
        match e {
            EstimationError::Tmm(t) => t.into(),
            other => CliError::Physics(other.to_string()),
        }
    }
}

impl From<ContinuumError> for CliError {
    fn from(e: ContinuumError) -> Self {
        match e {
            ContinuumError::Tmm(t) => t.into(),
            ContinuumError::Estimation(t) => t.into(),
            other => CliError::Physics(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "homsense",
    version,
    about = "Plasmonic HOM refractive-index sensing model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit film and gap thicknesses so that T = R at the target n_s.
    Calibrate(CalibrateArgs),
    /// T, R, A against incidence angle and against n_s.
    Spectrum(SweepArgs),
    /// Two-photon outcome and click probabilities against n_s.
    Coincidence(SweepArgs),
    /// HOM and coherent Fisher information, decompositions, phase scans.
    Fisher(SweepArgs),
    /// Enhancement over the wavelength × n_s plane.
    Map(SweepArgs),
    /// Systematic uncertainty budget.
    Budget(SweepArgs),
    /// Broadband corrections to the single-mode information.
    Continuum(SweepArgs),
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long, default_value_t = 1.31)]
    pub target_ns: f64,
    #[arg(long, default_value_t = 800.0)]
    pub wavelength_nm: f64,
    #[arg(long, default_value_t = 70.0)]
    pub theta_deg: f64,
    /// Starting stack (JSON); the built-in sensor when omitted.
    #[arg(long)]
    pub stack: Option<PathBuf>,
    /// Directory for stack.json and run_metadata.json; the stack is printed
    /// to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `output_dir` from the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn worker_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(WORKERS_ENV) {
        let n: usize = value
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| {
                CliError::Config(format!("{WORKERS_ENV}={value} is not a positive integer"))
            })?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Config(e.to_string()))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let pool = worker_pool()?;
    pool.install(|| commands::dispatch(cli.command))
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("homsense: {e}");
            e.exit_code()
        }
    }
}
