mod args;
mod commands;
mod output;
mod state;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

/// Failure of a run, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    Lib(qdiscord::Error),
    Io(std::io::Error),
    /// A verification suite ran to completion and did not pass.
    Failed(String),
}

impl From<qdiscord::Error> for CliError {
    fn from(e: qdiscord::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_input_error() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Failed(msg) => f.write_str(msg),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
