//! `adlab <scenario> --config <path> [--out <dir>] [--seed <u64>] [--trials <n>]`

mod config;
mod error;
mod output;
mod scenarios;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{Overrides, RunConfig, Scenario};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "adlab", version, about = "Adiabatic tripod transfer under dephasing: scenario runner")]
struct Args {
    scenario: Scenario,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo trial count.
    #[arg(long)]
    trials: Option<usize>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("ADLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("ADLAB_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the worker pool: {e}")))
}

fn execute(args: Args) -> Result<(), CliError> {
    configure_threads()?;
    let overrides = Overrides { out: args.out, seed: args.seed, trials: args.trials };
    let config = RunConfig::load(&args.config)?.resolve(args.scenario, &overrides)?;
    let outcome = scenarios::run(&config)?;
    let [csv, json] = output::write_outputs(&config, &outcome.table, &outcome.results)?;
    println!("{}", csv.display());
    println!("{}", json.display());
    match outcome.mismatch {
        Some(msg) => Err(CliError::OracleMismatch(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("adlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
