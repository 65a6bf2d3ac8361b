//! `localtaylor`: single solves, parameter sweeps and the published error
//! tables for the local Taylor collocation solver.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration,
//! 3 solver failure. Errors are reported on stderr as one JSON object.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{SolveArgs, SweepArgs, TableArgs, TABLE1, TABLE2};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "invalid_config",
            CliError::Solver(_) => "solver_failure",
            CliError::Io(_) => "io",
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "localtaylor", version, about = "Local Taylor collocation solver for advection-diffusion and Burgers problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one configuration and write the summary row and grid dumps.
    Solve(SolveArgs),
    /// Vary K, M, S or theta and write one summary row per point.
    Sweep(SweepArgs),
    /// Sine-product diffusion table with transcribed literature results.
    Table1(TableArgs),
    /// Burgers front table with transcribed literature results.
    Table2(TableArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => commands::run_solve(args),
        Command::Sweep(args) => commands::run_sweep(args),
        Command::Table1(args) => commands::run_table(&TABLE1, args),
        Command::Table2(args) => commands::run_table(&TABLE2, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{body}");
            ExitCode::from(e.code())
        }
    }
}
