//! `fairshare`: simulate, price and analyze a priced training-data market.
//!
//! Exit codes: 0 on success, 2 for usage, configuration or input errors,
//! 3 when an output cannot be written.

mod analyze;
mod failure;
mod price;
mod simulate;
mod single;
mod value;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use failure::Failure;

#[derive(Debug, Parser)]
#[command(name = "fairshare", version, about = "Training-data market simulator and pricing solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write trace, summary and manifest.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long, env = "FAIRSHARE_OUT", default_value = "fairshare-out")]
        out: PathBuf,
        /// Override the configured seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Price a new dataset against a market snapshot.
    Price(price::PriceArgs),
    /// Score datasets and write a normalized score file.
    Value(value::ValueArgs),
    /// Statistics over score files and traces.
    Analyze {
        #[command(subcommand)]
        command: analyze::AnalyzeCommand,
    },
    /// Check participation and discount assumptions for a single buyer-seller pair.
    CheckAssumptions(single::AssumptionArgs),
    /// Best constant price per horizon for a single buyer-seller pair.
    Bellman(single::BellmanArgs),
    /// Trade-off threshold between fairshare and a constant exploitative price.
    Threshold(single::ThresholdArgs),
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate { config, out, seed } => simulate::run(&config, &out, seed),
        Command::Price(args) => price::run(&args),
        Command::Value(args) => value::run(&args),
        Command::Analyze { command } => analyze::run(&command),
        Command::CheckAssumptions(args) => single::check_assumptions(&args),
        Command::Bellman(args) => single::bellman(&args),
        Command::Threshold(args) => single::threshold(&args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
