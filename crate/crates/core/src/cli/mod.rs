//! The `bbm5` command line: one JSON config, one subcommand per experiment,
//! plot-ready CSV and JSON outputs.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical abort, 1 any
//! other failure (for example an unwritable output directory).

mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
pub use config::ExperimentConfig;

pub const OUT_DIR_ENV: &str = "BBM5_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "bbm5_out";

#[derive(Debug, Parser)]
#[command(
    name = "bbm5",
    version,
    about = "Spectral laboratory for the fifth-order BBM equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON experiment configuration; defaults are used when absent.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides the config and BBM5_OUT_DIR).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for random initial data (overrides the config).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Print nothing on success.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub common: Common,
    /// Replace ρ by the value that makes the energy conserved.
    #[arg(long)]
    pub rho_auto: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Derive the model coefficients and print them as JSON.
    Coeffs(CoeffsArgs),
    /// Evolve initial data and record energy and Sobolev norms.
    Simulate(Common),
    /// High/low frequency splitting sweep over cutoffs.
    Split(Common),
    /// Tabulate the Fourier multipliers.
    MultiplierTable(Common),
    /// Compare the measured energy rate with the drift law.
    EnergyDrift(Common),
    /// Solve the Duhamel formulation by Picard iteration.
    Picard(Common),
    /// Residual of the long-wave derivation over an ε sweep.
    DerivationResidual(Common),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Run(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(e) => match e {
                Error::InvalidParameter { .. }
                | Error::RegimeInvalid(_)
                | Error::GridMismatch
                | Error::BelowThreshold { .. }
                | Error::ExceedsExistenceTime { .. }
                | Error::Unsupported(_)
                | Error::Json(_) => 2,
                Error::NonFinite(_) | Error::PicardNonConvergence { .. } | Error::SimulationAborted { .. } => 3,
                Error::Io(_) | Error::Csv(_) => 1,
            },
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("bbm5: {e}");
            e.exit_code()
        }
    }
}
