//! Command-line sweeps, Monte Carlo validation and self-test for `coopsense`.
//!
//! Every command reads a [`RunConfig`], computes a table and hands it back as
//! CSV text. The binary only parses arguments, writes the text and maps
//! [`CliError`] to an exit code.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

pub mod commands;
pub mod config;
pub mod oracle;
pub mod output;
pub mod selftest;

pub use config::{ModelKind, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{0}")]
    Infeasible(String),
    #[error(transparent)]
    Compute(#[from] coopsense::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Combining scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Egc,
    WcFixed,
    WcAdaptive,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Egc => "egc",
            Scheme::WcFixed => "wc-fixed",
            Scheme::WcAdaptive => "wc-adaptive",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "coopsense",
    version,
    about = "Cooperative spectrum sensing sweeps and validation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration; defaults are used for missing keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the configured Monte Carlo seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the configured Monte Carlo trial count.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Restricts output to one combining scheme.
    #[arg(long, global = true, value_enum)]
    pub scheme: Option<Scheme>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Complementary ROC: missed detection against false alarm.
    Roc,
    /// Spectrum utilization (1 - false alarm) at target detection levels.
    Utilization,
    /// Mean SNR needed to reach target detection and false-alarm levels.
    SnrReq,
    /// Closed forms against Monte Carlo at three sigma.
    Validate,
    /// Built-in identity and oracle checks.
    Selftest,
}

/// A finished command: the text to emit and any failed checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub failures: Vec<String>,
}

/// Resolves the config and runs the selected command.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    cfg.validate()?;
    let table = |t: output::Table| Report {
        text: t.to_csv(),
        failures: Vec::new(),
    };
    match cli.command {
        Command::Roc => commands::roc(&cfg, cli.scheme).map(table),
        Command::Utilization => commands::utilization(&cfg, cli.scheme).map(table),
        Command::SnrReq => commands::snr_requirement(&cfg, cli.scheme).map(table),
        Command::Validate => {
            let v = commands::validate(&cfg, cli.scheme.unwrap_or(Scheme::Egc))?;
            Ok(Report {
                text: v.table.to_csv(),
                failures: v.failures,
            })
        }
        Command::Selftest => Ok(selftest::run()),
    }
}
