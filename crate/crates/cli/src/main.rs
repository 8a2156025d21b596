mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

/// Failure of a subcommand, mapped onto the exit-code contract.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Check(String),
}

impl From<bjss_core::Error> for Failure {
    fn from(e: bjss_core::Error) -> Self {
        match e {
            bjss_core::Error::Domain { .. } => Failure::Usage(e.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Check(format!("i/o error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match &cli.command {
        Command::Probabilities(o) => commands::probabilities(o),
        Command::Margin(o) => commands::margin(o),
        Command::CriticalCurve(o) => commands::critical_curve(o),
        Command::ApproxCheck(o) => commands::approx_check(o),
        Command::Reproduce(o) => commands::reproduce(o),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
