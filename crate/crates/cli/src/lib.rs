//! Command-line front end for `mid-core`.
//!
//! Exit codes: 0 on success, 2 for unreadable or malformed input, 3 for
//! invalid flags or flag combinations.

pub mod args;
pub mod commands;
pub mod io;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::{Cli, Command};
pub use commands::{cmd_calibrate, cmd_detect, cmd_simulate, ConfigEcho, JsonReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Config(String),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Output(_) => 2,
            CliError::Config(_) => 3,
        }
    }
}

/// Parses `argv` and runs the selected command; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
        }
    };
    let result = match cli.command {
        Command::Detect(a) => cmd_detect(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Calibrate(a) => cmd_calibrate(&a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
