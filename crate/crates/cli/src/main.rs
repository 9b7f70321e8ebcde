//! `npim` command-line harness.

mod commands;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{bench, generalize, generate, sweep, trace, train, Globals};
use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "npim", version, about = "Train and benchmark neural-network-parameterized Ising machines")]
struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write generated instances as JSON documents or G-set files.
    Generate(generate::GenerateArgs),
    /// Train a model from a (possibly multi-stage) training config.
    Train(train::TrainArgs),
    /// Measure success probability and time to solution on a suite.
    Bench,
    /// Export x/h traces and unrolled weights of a model.
    Trace(trace::TraceArgs),
    /// Train on growing training sets and score a held-out split.
    Generalize,
    /// Train one model per architecture in a grid.
    Sweep,
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let g = Globals { config: cli.config, seed: cli.seed, out: cli.out };
    match &cli.command {
        Command::Generate(a) => generate::run(a, &g),
        Command::Train(a) => train::run(a, &g),
        Command::Bench => bench::run(&g),
        Command::Trace(a) => trace::run(a, &g),
        Command::Generalize => generalize::run(&g),
        Command::Sweep => sweep::run(&g),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
