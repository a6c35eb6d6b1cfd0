//! Command-line front end for the time-bin walk simulator.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod landscape;
pub mod output;
pub mod plot;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::commands::Outputs;
use crate::config::{Overrides, RunConfig};
use crate::output::{resolve_out_dir, write_all, OUT_DIR_ENV};

#[derive(Debug, Parser)]
#[command(
    name = "timebin-qwalk",
    version,
    about = "Simulate a time-bin encoded discrete-time quantum walk"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve the walk and write per-step distributions and oracle fidelities.
    Walk(RunArgs),
    /// Synthesize the Kerr-gated delay scan and its discretized readout.
    Trace(RunArgs),
    /// Variance per step against the classical random walk.
    Variance(RunArgs),
    /// Fidelity over time under stochastic coin drift.
    Stability(RunArgs),
    /// Loss budget of the optical setup.
    Budget(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; beats the environment and the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of steps; truncates a listed schedule.
    #[arg(long)]
    pub steps: Option<usize>,
}

impl Command {
    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Walk(a)
            | Command::Trace(a)
            | Command::Variance(a)
            | Command::Stability(a)
            | Command::Budget(a) => a,
        }
    }
}

/// Computes a subcommand's outputs without touching the filesystem.
pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Outputs> {
    match command {
        Command::Walk(_) => commands::walk(cfg),
        Command::Trace(_) => commands::trace(cfg),
        Command::Variance(_) => commands::variance_cmd(cfg),
        Command::Stability(_) => commands::stability(cfg),
        Command::Budget(_) => commands::budget(cfg),
    }
}

/// Loads the config, computes everything, then writes all files at once.
/// Returns the output directory and the outputs.
pub fn run(cli: &Cli) -> Result<(PathBuf, Outputs)> {
    let args = cli.command.args();
    let overrides = Overrides {
        seed: args.seed,
        steps: args.steps,
    };
    let cfg = RunConfig::load(&args.config, overrides)?;
    let dir = resolve_out_dir(
        args.out.as_deref(),
        std::env::var_os(OUT_DIR_ENV),
        cfg.output_dir.as_deref(),
    );
    let outputs = execute(&cli.command, &cfg)?;
    write_all(&dir, &outputs.files)
        .with_context(|| format!("writing outputs to {}", display(&dir)))?;
    Ok((dir, outputs))
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
