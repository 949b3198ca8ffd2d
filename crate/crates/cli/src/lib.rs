//! Command-line driver: `simulate`, `diagnose`, `verify` and `sweep`.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Environment variable naming the output directory used when neither
/// `--out` nor `[run] out` is given.
pub const OUT_DIR_ENV: &str = "VOLTERRA_OUT_DIR";

/// Output directory used when nothing else is configured.
pub const DEFAULT_OUT_DIR: &str = "volterra-out";

#[derive(Debug, Parser)]
#[command(name = "volterra", version, about = "Simulate and diagnose forced sublinear Volterra summation equations")]
pub struct Cli {
    #[command(flatten)]
    pub options: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed override; expanded per scenario by `verify` and `sweep`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Horizon override (for `verify`, the last rung of every ladder).
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Fraction of the sequence used by tail supremum estimates.
    #[arg(long, global = true)]
    pub tail_fraction: Option<f64>,
    /// Reject unknown configuration keys (default).
    #[arg(long, global = true, overrides_with = "permissive")]
    pub strict: bool,
    /// Warn about unknown configuration keys instead of failing.
    #[arg(long, global = true, overrides_with = "strict")]
    pub permissive: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Simulate one path and write it as a table.
    Simulate {
        /// Replay the `H` column of a previously written table instead of generating the forcing.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Simulate one path and write its diagnostic tracks and summary.
    Diagnose {
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Run the theorem checks and write a report; exits 1 if any check fails.
    Verify,
    /// Run one report per value of a parameter grid.
    Sweep,
}
