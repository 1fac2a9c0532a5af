use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::WitnessError;
use crate::solver::random_product_state;
use crate::tensor::{ComplexVector, MultipartiteOperator, ProductState, SubsystemDims};
use crate::C64;

/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Allowed negativity of the smallest eigenvalue.
pub const PSD_TOL: f64 = 1e-10;

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: MultipartiteOperator,
    min_eigenvalue: f64,
}

impl DensityOperator {
    pub fn new(op: MultipartiteOperator) -> Result<Self, WitnessError> {
        let trace = op.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(WitnessError::NotDensity(format!("trace is {trace}, expected 1")));
        }
        let min_eigenvalue = op.eigenvalues().first().copied().unwrap_or(0.0);
        if min_eigenvalue < -PSD_TOL {
            return Err(WitnessError::NotDensity(format!(
                "smallest eigenvalue is {min_eigenvalue:e}"
            )));
        }
        Ok(Self { op, min_eigenvalue })
    }

    /// `|v><v| / <v|v>`.
    pub fn pure(v: &ComplexVector) -> Result<Self, WitnessError> {
        let n2 = v.norm().powi(2);
        if n2 == 0.0 {
            return Err(WitnessError::NotDensity("zero vector".into()));
        }
        let e = v.entries();
        let op = MultipartiteOperator::from_upper_fn(v.dims().clone(), |i, j| e[i] * e[j].conj() / n2);
        Self::new(op)
    }

    /// `sum_k p_k |a_k><a_k|` with the weights rescaled to sum to one.
    pub fn separable_mixture(terms: &[(f64, ProductState)]) -> Result<Self, WitnessError> {
        let Some((_, first)) = terms.first() else {
            return Err(WitnessError::NotDensity("empty mixture".into()));
        };
        let dims = first.dims().clone();
        let total: f64 = terms.iter().map(|(p, _)| p).sum();
        if terms.iter().any(|(p, _)| *p < 0.0) || !(total > 0.0) {
            return Err(WitnessError::NotDensity("weights must be non-negative with positive sum".into()));
        }
        let flats = terms
            .iter()
            .map(|(p, s)| {
                if s.dims() != &dims {
                    return Err(crate::TensorError::dims_mismatch(&dims, s.dims()).into());
                }
                Ok((p / total, s.flatten().into_entries()))
            })
            .collect::<Result<Vec<_>, WitnessError>>()?;
        let op = MultipartiteOperator::from_upper_fn(dims, |i, j| {
            flats
                .iter()
                .map(|(p, v)| v[i] * v[j].conj() * *p)
                .sum::<C64>()
        });
        Self::new(op)
    }

    /// Seeded mixture of `terms` random product projectors with uniform random weights.
    pub fn random_separable(dims: &SubsystemDims, terms: usize, seed: u64) -> Result<Self, WitnessError> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mixture: Vec<(f64, ProductState)> = (0..terms.max(1))
            .map(|_| {
                let w: f64 = rng.gen_range(0.01..1.0);
                (w, random_product_state(dims, rng.gen()))
            })
            .collect();
        Self::separable_mixture(&mixture)
    }

    pub fn dims(&self) -> &SubsystemDims {
        self.op.dims()
    }

    pub fn operator(&self) -> &MultipartiteOperator {
        &self.op
    }

    pub fn into_operator(self) -> MultipartiteOperator {
        self.op
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }
}
