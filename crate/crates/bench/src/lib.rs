//! `mbvi` command line: run benchmark solves, audit traces, emit plot scripts.

pub mod audit;
pub mod cli;
pub mod plot;
pub mod run;

use std::ffi::OsString;

use clap::Parser;
use thiserror::Error;

use cli::{Cli, Command};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Solver(#[from] mbvi::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 1,
            CliError::Solver(mbvi::Error::InfeasibleStart { .. }) => 1,
            CliError::Solver(_) => 3,
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand, returning the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(args) => run::cmd_run(&args),
        Command::Audit(args) => audit::cmd_audit(&args),
        Command::Plot(args) => plot::cmd_plot(&args).map(|_| 0),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
