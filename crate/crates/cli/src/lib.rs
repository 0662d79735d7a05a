//! Command-line front end: curve fitting, standalone and bundle pricing,
//! parameter sweeps, and Monte Carlo checks.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use config::MarketConfig;
pub use error::{CliError, ExitKind};

#[derive(Debug, Parser)]
#[command(name = "iotprice", version, about = "Data pricing for machine-learning IoT services")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a quality curve to an `n,accuracy` CSV.
    Fit {
        samples: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal fee and data size for one service sold alone.
    Standalone {
        #[arg(long)]
        config: PathBuf,
        /// Which service block to price.
        #[arg(long, default_value_t = 1)]
        service: usize,
    },
    /// Optimal bundle and its profit split.
    Bundle {
        #[arg(long)]
        config: PathBuf,
        /// Also compare against the printed closed forms.
        #[arg(long)]
        diagnose: bool,
    },
    /// Re-optimize over the config's `[sweep]` range and emit CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare analytic demand with sampled customers.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Runs one command, writing its report to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Fit { samples, out: path } => commands::fit_command(samples, path.as_deref(), out),
        Command::Standalone { config, service } => {
            if *service == 0 {
                return Err(CliError::input("services are numbered from 1"));
            }
            commands::standalone_command(&MarketConfig::load(config)?, service - 1, out)
        }
        Command::Bundle { config, diagnose } => commands::bundle_command(&MarketConfig::load(config)?, *diagnose, out),
        Command::Sweep { config, out: path } => {
            commands::sweep_command(&MarketConfig::load(config)?, path.as_deref(), out)
        }
        Command::Simulate { config, samples, seed } => {
            commands::simulate_command(&MarketConfig::load(config)?, *samples, *seed, out)
        }
    }
}
