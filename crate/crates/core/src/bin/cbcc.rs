//! Command-line front end for the experiment harness.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cbcc::dataio::write_atomic;
use cbcc::harness::{curves_dir, run_to_dir, summarize_dir, summary_csv, ExperimentConfig, PreparedData};
use cbcc::Error;
use clap::{Args, Parser, Subcommand};
use log::error;

#[derive(Parser)]
#[command(name = "cbcc", version, about = "Bandits with corrupted context: experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a (policy x corruption level x repetition) grid and write record files.
    Run(RunArgs),
    /// Aggregate record files into an error table (also written to summary.csv).
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Write mean cumulative-error curves per dataset and corruption level.
    Curves {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<String>,
    /// Policy name or comma-separated list: mab, nsmab, cmab, tscc.
    #[arg(long)]
    policy: Option<String>,
    /// Comma-separated corruption probabilities.
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    rounds: Option<String>,
    #[arg(long)]
    reps: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    cap: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    out: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> Vec<(&'static str, &String)> {
        [
            ("dataset", &self.dataset),
            ("policy", &self.policy),
            ("levels", &self.levels),
            ("rounds", &self.rounds),
            ("reps", &self.reps),
            ("seed", &self.seed),
            ("cap", &self.cap),
            ("workers", &self.workers),
            ("out", &self.out),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k, v)))
        .collect()
    }
}

fn build_config(args: &RunArgs) -> cbcc::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &args.config {
        cfg.apply_file(path)?;
    }
    cfg.apply_env(std::env::vars())?;
    for (k, v) in args.overrides() {
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Failures of `run`, tagged by stage so data problems map to their own exit code.
enum RunError {
    Config(Error),
    Data(Error),
    Other(Error),
}

fn run(args: &RunArgs) -> Result<(), RunError> {
    let cfg = build_config(args).map_err(RunError::Config)?;
    let data = PreparedData::load(&cfg).map_err(|e| match e {
        Error::Config(_) => RunError::Config(e),
        e => RunError::Data(e),
    })?;
    let report = run_to_dir(&cfg, &data).map_err(|e| match e {
        Error::Config(_) | Error::InvalidParameter(_) => RunError::Config(e),
        e if e.is_data_error() => RunError::Data(e),
        e => RunError::Other(e),
    })?;
    for f in &report.record_files {
        println!("{}", f.display());
    }
    Ok(())
}

fn summarize(input: &Path) -> cbcc::Result<()> {
    let (rows, levels) = summarize_dir(input)?;
    println!("{:<24} {:<6} {:>10} {:>9} {:>6}", "dataset", "policy", "error %", "std", "cells");
    for r in &rows {
        println!(
            "{:<24} {:<6} {:>10.2} {:>9.2} {:>6}",
            r.dataset, r.policy, r.mean_error_pct, r.std_error_pct, r.cells
        );
    }
    write_atomic(&input.join("summary.csv"), summary_csv(&rows, &levels).as_bytes())
}

fn classify(e: Error) -> RunError {
    match e {
        Error::Config(_) => RunError::Config(e),
        e if e.is_data_error() || matches!(e, Error::EmptyInput) => RunError::Data(e),
        e => RunError::Other(e),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Summarize { input } => summarize(input).map_err(classify),
        Command::Curves { input } => curves_dir(input)
            .map(|files| {
                for f in files {
                    println!("{}", f.display());
                }
            })
            .map_err(classify),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Config(e)) => {
            error!("{e}");
            ExitCode::from(2)
        }
        Err(RunError::Data(e)) => {
            error!("{e}");
            ExitCode::from(3)
        }
        Err(RunError::Other(e)) => {
            error!("{e}");
            ExitCode::from(1)
        }
    }
}
