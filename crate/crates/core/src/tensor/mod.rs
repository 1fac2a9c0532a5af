//! Dense multipartite linear algebra: subsystem structure, product states,
//! operators, partial traces and reduced operators.

mod contract;
mod dims;
mod operator;
mod partition;
mod vector;

use thiserror::Error;

pub use contract::{partial_trace_last, project_out_component};
pub(crate) use contract::{contract_except, contract_prefix};
pub use dims::SubsystemDims;
pub use operator::{LinearAction, MultipartiteOperator, HERMITIAN_TOL, QUADRATIC_FORM_IMAG_TOL};
pub(crate) use operator::real_quadratic_form;
pub use partition::{enumerate_partitions, subsystem_permutation, CoarseGrained, Partition};
pub use vector::{ComplexVector, ProductState, FACTOR_NORM_TOL};
pub(crate) use vector::flatten_factors;

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("invalid subsystem dimensions: {0}")]
    InvalidDims(String),
    #[error("expected {expected} entries, found {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimsMismatch { left: String, right: String },
    #[error("factor {factor} has norm {norm}, expected 1")]
    NotNormalized { factor: usize, norm: f64 },
    #[error("zero vector: {0}")]
    ZeroVector(String),
    #[error("matrix is not Hermitian: entry ({row}, {col}) deviates by {deviation:e}")]
    NotHermitian { row: usize, col: usize, deviation: f64 },
    #[error("quadratic form has imaginary part {imag:e}")]
    NotReal { imag: f64 },
    #[error("subsystem index {index} out of range for {parties} parties")]
    SubsystemOutOfRange { index: usize, parties: usize },
    #[error("operation needs at least {needed} parties, got {actual}")]
    TooFewParties { needed: usize, actual: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
}

impl TensorError {
    pub(crate) fn dims_mismatch(left: &SubsystemDims, right: &SubsystemDims) -> Self {
        Self::DimsMismatch {
            left: left.to_string(),
            right: right.to_string(),
        }
    }
}
