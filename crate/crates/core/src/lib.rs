//! Maximal separability eigenvalues of positive operators on multipartite
//! Hilbert spaces via the separability power iteration (SPI), and the
//! entanglement witnesses built from them.
//!
//! Tensor indices are big-endian throughout: in a flat index, subsystem 1
//! varies slowest.

pub mod io;
pub mod linalg;
pub mod oracle;
pub mod solver;
pub mod states;
pub mod tensor;
pub mod witness;

pub use num_complex::Complex64 as C64;
pub use tensor::{
    ComplexVector, MultipartiteOperator, Partition, ProductState, SubsystemDims, TensorError,
};
pub use solver::{
    max_separability_eigenvalue, spi_solve, SolverError, SpiConfig, SpiResult, StartStrategy,
    WitnessBound,
};
pub use witness::{build_witness, test_state, DensityOperator, Witness, WitnessError};
