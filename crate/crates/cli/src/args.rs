use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spi_core::states::NamedState;
use spi_core::{Partition, SpiConfig, StartStrategy};

#[derive(Debug, Parser)]
#[command(name = "spi", version, about = "Separability eigenvalues, witnesses and benchmarks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Convergence threshold on the N-orthogonality residual.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 10_000)]
    pub max_cycles: usize,
    /// Starting vectors; `bench` defaults to eigproj, everything else to basis.
    #[arg(long, global = true, value_enum)]
    pub start: Option<StartArg>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Size of the worker pool.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory. `solve`, `witness` and `states` print to stdout without it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StartArg {
    Basis,
    Eigproj,
}

impl GlobalArgs {
    pub fn config(&self, default_start: StartArg) -> SpiConfig {
        let strategy = match self.start.unwrap_or(default_start) {
            StartArg::Basis => StartStrategy::OperatorBasis,
            StartArg::Eigproj => StartStrategy::EigenvectorProjection,
        };
        SpiConfig {
            epsilon: self.tol,
            max_cycles: self.max_cycles,
            seed: self.seed,
            ..SpiConfig::default()
        }
        .with_strategy(strategy)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximal separability eigenvalue of an operator file (`-` reads stdin).
    Solve {
        file: PathBuf,
        /// Grouping of subsystems, e.g. `1,2|3,4`; defaults to every subsystem alone.
        #[arg(long)]
        partition: Option<Partition>,
    },
    #[command(subcommand)]
    Witness(WitnessCommand),
    #[command(subcommand)]
    Reproduce(Reproduce),
    #[command(subcommand)]
    Bench(Bench),
    #[command(subcommand)]
    States(StatesCommand),
}

#[derive(Debug, Subcommand)]
pub enum WitnessCommand {
    /// Builds `g_max 1 - L` and evaluates it on a density operator.
    Test {
        #[arg(long)]
        operator: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        partition: Option<Partition>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Reproduce {
    /// Two-qutrit detection grid over alpha and beta in [0, 5].
    Horodecki {
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
    /// Four-qubit partition scan of `L = S`.
    Smolin,
    /// Per-cycle overlap of the two factors on `2 1 - V`.
    SwapRecurrence {
        #[arg(long, default_value_t = 0.5)]
        gamma2: f64,
        #[arg(long, default_value_t = 10)]
        cycles: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum Bench {
    /// Two parties, local dimension from `--sizes` (default 2..=8).
    Dims(BenchArgs),
    /// Qubits, party count from `--sizes` (default 2..=10).
    Parties(BenchArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 5)]
    pub samples: usize,
    #[arg(long, default_value_t = 32)]
    pub population: usize,
    #[arg(long, default_value_t = 100)]
    pub generations: usize,
    #[arg(long, default_value_t = 2)]
    pub restarts: usize,
    #[arg(long, default_value_t = 50)]
    pub refine_iters: usize,
    #[arg(long, default_value_t = 0.3)]
    pub mutation_scale: f64,
}

#[derive(Debug, Subcommand)]
pub enum StatesCommand {
    /// Writes a named operator as JSON.
    Export {
        /// smolin, horodecki:<alpha>, swap:<d> or random:<d1>x<d2>...:<seed>
        #[arg(long)]
        name: NamedState,
    },
}
