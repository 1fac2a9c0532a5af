//! The `spi` command line.
//!
//! Exit codes: 0 success, 1 input error, 2 a solver run did not converge
//! (results are still written).

pub mod args;
mod bench;
mod commands;
pub mod output;
mod reproduce;

use std::path::Path;

use spi_core::io::IoError;
use spi_core::oracle::OracleError;
use spi_core::states::StatesError;
use spi_core::{SolverError, TensorError, WitnessError};
use thiserror::Error;

pub use args::{Cli, Command};
pub use output::{RunManifest, StageTiming};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Read { path: String, source: IoError },
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error(transparent)]
    States(#[from] StatesError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Threads(#[from] rayon::ThreadPoolBuildError),
    #[error("{0}")]
    NotConverged(String),
}

impl CliError {
    pub fn output(path: &Path, source: std::io::Error) -> Self {
        CliError::Output {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::NotConverged(_)
            | CliError::Solver(SolverError::NoConvergence { .. })
            | CliError::Witness(WitnessError::Solver(SolverError::NoConvergence { .. })) => 2,
            _ => 1,
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(CliError::Input("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let g = &cli.global;
    match &cli.command {
        Command::Solve { file, partition } => commands::solve(g, file, partition.as_ref()),
        Command::Witness(args::WitnessCommand::Test {
            operator,
            state,
            partition,
        }) => commands::witness_test(g, operator, state, partition.as_ref()),
        Command::Reproduce(target) => reproduce::run(g, target),
        Command::Bench(mode) => bench::run(g, mode),
        Command::States(args::StatesCommand::Export { name }) => commands::export(g, name),
    }
}
