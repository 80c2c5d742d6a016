mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Context;
use config::{require_file, RunConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "ssls", version, about = "Sparse regression, simulation and index tracking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run manifest.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out_dir` in the manifest).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Base seed (overrides every seed in the manifest).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for replications and windows.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Fit one penalized or two-stage model.
    Fit,
    /// Write the regularization path of a lasso-type method.
    Path,
    /// Run a Monte-Carlo experiment.
    Simulate,
    /// Run the five-method loss benchmark.
    Benchmark,
    /// Run the index-tracking backtest.
    Track,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config_path = cli
        .config
        .ok_or_else(|| CliError::Invalid("--config <FILE> is required".into()))?;
    require_file(&config_path)?;
    let config = RunConfig::load(&config_path)?;
    let out_dir = cli
        .out_dir
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out_dir).map_err(|source| CliError::Io {
        path: out_dir.clone(),
        source,
    })?;
    let ctx = Context {
        config,
        out_dir,
        seed: cli.seed,
    };
    let exec = || match cli.command {
        Command::Fit => commands::cmd_fit(&ctx),
        Command::Path => commands::cmd_path(&ctx),
        Command::Simulate => commands::cmd_simulate(&ctx),
        Command::Benchmark => commands::cmd_benchmark(&ctx),
        Command::Track => commands::cmd_track(&ctx),
    };
    match cli.workers {
        Some(0) => Err(CliError::Invalid("--workers must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Invalid(format!("cannot start {n} workers: {e}")))?
            .install(exec),
        None => exec(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            ExitCode::FAILURE
        }
    }
}
