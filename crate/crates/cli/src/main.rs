//! `crsm`: command-line front end for the `crsm` library.
//!
//! Exit codes: 0 success, 1 failed check or domain error, 2 usage or
//! malformed input, 3 carrier size cap exceeded.

mod args;
mod commands;
mod provenance;

use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use crsm::io::ModelError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error(transparent)]
    Domain(#[from] crsm::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    /// The command ran and its verdict is negative; the report is already written.
    #[error("check failed")]
    CheckFailed,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Model(e) if e.size_cap => 3,
            CliError::Model(_) => 2,
            CliError::Domain(crsm::Error::CarrierTooLarge { .. }) => 3,
            CliError::Domain(_) | CliError::CheckFailed => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::CheckFailed) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
