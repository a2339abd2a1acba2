//! `imp`: generate, deinterleave and analyze interleaved Markov sequences,
//! and run the reference experiments.

mod bands;
mod commands;
mod error;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{
    AnalyzeArgs, BenchmarkArgs, CalibrateArgs, DeinterleaveArgs, DrawModelArgs, GenerateArgs,
    ReplayArgs,
};
use crate::error::CliError;

/// Interleaved Markov process toolkit.
///
/// Exit codes: 0 success, 1 assertion failure, 2 invalid input,
/// 3 computation budget exceeded.
#[derive(Debug, Parser)]
#[command(name = "imp", version)]
struct Cli {
    /// Worker threads for parallel experiment trials (default: all cores).
    #[arg(long, global = true, env = "IMP_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a sequence from a Markov or IMP model file.
    Generate(GenerateArgs),
    /// Recover the partition, orders and streams of a sequence.
    Deinterleave(DeinterleaveArgs),
    /// Report domination structure, canonical and compatible partitions of an IMP.
    Analyze(AnalyzeArgs),
    /// Run an experiment configuration and tabulate success fractions.
    Benchmark(BenchmarkArgs),
    /// Sweep the baseline tolerance scale on an experiment configuration.
    Calibrate(CalibrateArgs),
    /// Write the random IMP of one experiment trial as a model file.
    DrawModel(DrawModelArgs),
    /// Rerun the command recorded in a manifest and compare output digests.
    Replay(ReplayArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::input(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Generate(a) => commands::generate(&a).map(drop),
        Command::Deinterleave(a) => commands::deinterleave(&a).map(drop),
        Command::Analyze(a) => commands::analyze(&a).map(drop),
        Command::Benchmark(a) => commands::benchmark(&a).map(drop),
        Command::Calibrate(a) => commands::calibrate(&a).map(drop),
        Command::DrawModel(a) => commands::draw_model(&a).map(drop),
        Command::Replay(a) => commands::replay(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("imp: {e}");
            e.exit_code()
        }
    }
}
