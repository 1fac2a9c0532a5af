//! The separability power iteration (SPI).
//!
//! One SPI cycle maps a product state `|a>` to the product state with maximal
//! overlap with `|Psi> = L|a>`: the last subsystem is traced out of
//! `|Psi><Psi|` (forward step), the resulting (N-1)-party problem is solved
//! recursively, and the last factor is recovered by contracting `|Psi>` with
//! the solution (backward step). For N = 1 a cycle is a power-iteration step.
//! Expectation values never decrease from cycle to cycle; running the
//! iteration from an operator basis of starting vectors and taking the largest
//! limit yields the maximal separability eigenvalue.

mod bound;
mod power;
mod spi;
mod starts;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tensor::{ProductState, TensorError};

pub use bound::{
    ensure_positive, max_separability_eigenvalue, WitnessBound, POSITIVITY_MARGIN,
};
pub use power::{power_iteration, PowerIteration};
pub use spi::{first_form_residual, n_orthogonality_residual, spi_cycle, spi_solve, SpiResult};
pub use starts::{
    local_operator_basis, operator_basis_len, operator_basis_state, random_product_state,
    starting_vectors, ProjectorShift, MAX_OPERATOR_BASIS_STARTS,
};

/// How starting vectors for the multi-start maximization are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartStrategy {
    /// All products of local states whose projectors span each local operator space.
    OperatorBasis,
    /// A single start: the product state closest to the dominant eigenvector.
    EigenvectorProjection,
    Explicit(Vec<ProductState>),
}

impl StartStrategy {
    pub fn label(&self) -> &'static str {
        match self {
            StartStrategy::OperatorBasis => "basis",
            StartStrategy::EigenvectorProjection => "eigproj",
            StartStrategy::Explicit(_) => "explicit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpiConfig {
    /// Threshold on the N-orthogonality residual.
    pub epsilon: f64,
    /// Cycle budget per recursion level.
    pub max_cycles: usize,
    /// Threshold on `||L z - <z|L|z> z||` in the single-party base case.
    pub pi_epsilon: f64,
    pub pi_max_iters: usize,
    pub start_strategy: StartStrategy,
    pub seed: u64,
    /// Multiple of the identity added to the normalized reduced operator
    /// before recursing. Any positive value leaves the fixed points alone;
    /// small values keep the inner problems well separated and fast.
    pub inner_shift: f64,
}

impl Default for SpiConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-8,
            max_cycles: 10_000,
            pi_epsilon: 1e-10,
            pi_max_iters: 100_000,
            start_strategy: StartStrategy::OperatorBasis,
            seed: 0,
            inner_shift: 1e-4,
        }
    }
}

impl SpiConfig {
    pub fn with_strategy(mut self, strategy: StartStrategy) -> Self {
        self.start_strategy = strategy;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: &str| Err(SolverError::InvalidConfig(msg.to_string()));
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if !(self.pi_epsilon > 0.0) {
            return bad("pi_epsilon must be positive");
        }
        if self.max_cycles == 0 {
            return bad("max_cycles must be at least 1");
        }
        if self.pi_max_iters == 0 {
            return bad("pi_max_iters must be at least 1");
        }
        if !(self.inner_shift > 0.0) {
            return bad("inner_shift must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("backward projection vanished (norm {norm:e})")]
    DegenerateProjection { norm: f64 },
    #[error("no starting vector converged; best unconverged g = {}", best.g)]
    NoConvergence { best: Box<SpiResult> },
    #[error("starting vector set is empty")]
    NoStartingVectors,
    #[error("operator basis has {count} product states, more than the limit {limit}")]
    TooManyStarts { count: usize, limit: usize },
}
