//! Command-line driver for two-phase Grover search experiments.
//!
//! Exit codes: 0 when every internal cross-check passed, 1 when a cross-check failed,
//! 2 on invalid input.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

/// Sets the worker thread count.
pub const THREADS_ENV: &str = "CHANGING_ORACLE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "changing-oracle", version, about = "Grover search with an oracle that changes mid-run")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-step trajectory of one two-phase schedule.
    Simulate(commands::simulate::Args),
    /// Final success over a grid of phase lengths.
    Sweep(commands::sweep::Args),
    /// Distance-sum bounds for Grover and random strategies.
    Bounds(commands::bounds::Args),
    /// Relabelling invariance of averaged strategies.
    Avgcheck(commands::avgcheck::Args),
    /// Compile a grid-world map and run a schedule on it.
    Gridworld(commands::gridworld::Args),
}

fn init_threads() -> Result<()> {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let n: usize = value.parse().with_context(|| format!("{THREADS_ENV}={value}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    init_threads()?;
    match cli.command {
        Command::Simulate(a) => commands::simulate::run(a),
        Command::Sweep(a) => commands::sweep::run(a),
        Command::Bounds(a) => commands::bounds::run(a),
        Command::Avgcheck(a) => commands::avgcheck::run(a),
        Command::Gridworld(a) => commands::gridworld::run(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: a cross-check failed; see the summary");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
