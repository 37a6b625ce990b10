mod bound;
mod experiment;
mod input;
mod list;
mod measure;

use std::io::{ErrorKind, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use genbound::Error;

/// Evaluate information measures and generalization bounds, and run testbeds.
#[derive(Debug, Parser)]
#[command(name = "genbound", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate an information measure; prints the value in nats.
    Measure(measure::MeasureArgs),
    /// Evaluate a bound; prints {value, vacuous, components} as JSON.
    Bound(bound::BoundArgs),
    /// Run a testbed from a JSON run config and write CSV and JSON reports.
    Experiment(experiment::ExperimentArgs),
    /// Print a registry: measures, bounds or testbeds.
    List(list::ListArgs),
}

/// Stable exit codes: 0 ok, 2 parse, 3 domain, 4 infeasible, 5 identity violation.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Io(_) | Error::InvalidDistribution(_) | Error::Alignment(_) | Error::Config(_) => 2,
        Error::Infeasible { .. } => 4,
        Error::IdentityViolation(_) => 5,
        _ => 3,
    }
}

/// Writes `text` to stdout; a closed pipe ends output quietly.
pub(crate) fn emit(text: &str) -> genbound::Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Measure(a) => measure::run(&a),
        Command::Bound(a) => bound::run(&a),
        Command::Experiment(a) => experiment::run(&a),
        Command::List(a) => list::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("genbound: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
