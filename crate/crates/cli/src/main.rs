//! `ratlin`: approximate, linearize and simulate frequency-dependent systems.
//!
//! Exit codes: 0 success, 1 configuration or runtime error, 2 AAA did not
//! converge (outputs are still written), 3 the time integration diverged.

mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ConfigError, RunArgs};

#[derive(Parser)]
#[command(
    name = "ratlin",
    version,
    about = "Real rational approximation, linearization and time integration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the nonlinear functions; writes approx_error.csv and approximant.json.
    Approximate(RunArgs),
    /// Fit and list the poles; writes poles.csv.
    Poles(RunArgs),
    /// Fit and build the real pencil; writes A.mtx, E.mtx and pencil.json.
    Linearize(RunArgs),
    /// Fit, linearize and integrate in time; writes timeseries.csv.
    Simulate(RunArgs),
}

pub enum Failure {
    Config(String),
    Run(ratlin::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<ratlin::Error> for Failure {
    fn from(e: ratlin::Error) -> Self {
        match e {
            ratlin::Error::InvalidParameter(msg) | ratlin::Error::InvalidRange(msg) => {
                Failure::Config(msg)
            }
            other => Failure::Run(other),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.into())
    }
}

/// Result of a command that ran to completion.
pub enum Done {
    Ok,
    NotConverged,
}

fn main() -> ExitCode {
    // clap would exit with 2, which is reserved for nonconvergence
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Approximate(a) => a
            .resolve()
            .map_err(Failure::from)
            .and_then(|c| output::approximate(&c)),
        Command::Poles(a) => a
            .resolve()
            .map_err(Failure::from)
            .and_then(|c| output::poles(&c)),
        Command::Linearize(a) => a
            .resolve()
            .map_err(Failure::from)
            .and_then(|c| output::linearize(&c)),
        Command::Simulate(a) => a
            .resolve()
            .map_err(Failure::from)
            .and_then(|c| output::simulate(&c)),
    };
    match result {
        Ok(Done::Ok) => ExitCode::SUCCESS,
        Ok(Done::NotConverged) => {
            eprintln!("warning: AAA stopped at the degree cap before reaching the tolerance");
            ExitCode::from(2)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Run(e @ ratlin::Error::Divergence { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
