use serde::{Deserialize, Serialize};

use super::{SubsystemDims, TensorError};
use crate::linalg;
use crate::C64;

/// Unit-norm tolerance for product-state factors.
pub const FACTOR_NORM_TOL: f64 = 1e-12;

/// A vector in the full tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    dims: SubsystemDims,
    entries: Vec<C64>,
}

impl ComplexVector {
    pub fn new(dims: SubsystemDims, entries: Vec<C64>) -> Result<Self, TensorError> {
        if entries.len() != dims.total() {
            return Err(TensorError::LengthMismatch {
                expected: dims.total(),
                actual: entries.len(),
            });
        }
        Ok(Self { dims, entries })
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.entries
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.entries)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &ComplexVector) -> Result<C64, TensorError> {
        if self.dims != other.dims {
            return Err(TensorError::dims_mismatch(&self.dims, &other.dims));
        }
        Ok(linalg::dot(&self.entries, &other.entries))
    }

    pub(crate) fn from_parts_unchecked(dims: SubsystemDims, entries: Vec<C64>) -> Self {
        debug_assert_eq!(dims.total(), entries.len());
        Self { dims, entries }
    }
}

/// Pure product state `|a_1, ..., a_N>` stored factor by factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProductStateRepr", into = "ProductStateRepr")]
pub struct ProductState {
    dims: SubsystemDims,
    factors: Vec<Vec<C64>>,
}

impl ProductState {
    /// Builds a product state from factors that are already normalized.
    pub fn new(factors: Vec<Vec<C64>>) -> Result<Self, TensorError> {
        let dims = SubsystemDims::new(factors.iter().map(Vec::len).collect())?;
        for (j, f) in factors.iter().enumerate() {
            let n = linalg::norm(f);
            if (n - 1.0).abs() > FACTOR_NORM_TOL {
                return Err(TensorError::NotNormalized { factor: j + 1, norm: n });
            }
        }
        Ok(Self { dims, factors })
    }

    /// Normalizes each factor; fails on a zero factor.
    pub fn normalized(mut factors: Vec<Vec<C64>>) -> Result<Self, TensorError> {
        for (j, f) in factors.iter_mut().enumerate() {
            if linalg::normalize(f) == 0.0 {
                return Err(TensorError::ZeroVector(format!("factor {}", j + 1)));
            }
        }
        Self::new(factors)
    }

    /// Computational basis product `|i_1, ..., i_N>`.
    pub fn basis(dims: &SubsystemDims, indices: &[usize]) -> Result<Self, TensorError> {
        if indices.len() != dims.len() {
            return Err(TensorError::LengthMismatch {
                expected: dims.len(),
                actual: indices.len(),
            });
        }
        let mut factors = Vec::with_capacity(dims.len());
        for (j, &i) in indices.iter().enumerate() {
            let d = dims.get(j);
            if i >= d {
                return Err(TensorError::InvalidDims(format!(
                    "basis index {i} out of range for subsystem {} of dimension {d}",
                    j + 1
                )));
            }
            let mut f = vec![C64::new(0.0, 0.0); d];
            f[i] = C64::new(1.0, 0.0);
            factors.push(f);
        }
        Ok(Self {
            dims: dims.clone(),
            factors,
        })
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn num_parties(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, j: usize) -> &[C64] {
        &self.factors[j]
    }

    pub fn factors(&self) -> &[Vec<C64>] {
        &self.factors
    }

    /// Kronecker product of the factors, subsystem 1 slowest.
    pub fn flatten(&self) -> ComplexVector {
        ComplexVector::from_parts_unchecked(self.dims.clone(), flatten_factors(&self.factors))
    }

    /// The first `n` factors as a product state of their own.
    pub fn prefix(&self, n: usize) -> Result<Self, TensorError> {
        if n == 0 || n > self.factors.len() {
            return Err(TensorError::SubsystemOutOfRange {
                index: n,
                parties: self.factors.len(),
            });
        }
        Ok(Self {
            dims: self.dims.prefix(n)?,
            factors: self.factors[..n].to_vec(),
        })
    }

    /// Appends a normalized factor.
    pub fn extended(&self, factor: Vec<C64>) -> Result<Self, TensorError> {
        let mut factors = self.factors.clone();
        factors.push(factor);
        Self::new(factors)
    }

    /// Replaces factor `j` with an (already normalized) vector of the same length.
    pub fn with_factor(&self, j: usize, factor: Vec<C64>) -> Result<Self, TensorError> {
        if j >= self.factors.len() {
            return Err(TensorError::SubsystemOutOfRange {
                index: j + 1,
                parties: self.factors.len(),
            });
        }
        let mut factors = self.factors.clone();
        factors[j] = factor;
        Self::new(factors)
    }

    /// Makes the largest-magnitude entry of every factor real and positive.
    pub fn canonical_phase(mut self) -> Self {
        self.factors.iter_mut().for_each(|f| linalg::canonicalize_phase(f));
        self
    }

    /// `|<self|other>|` computed factor-wise.
    pub fn overlap_abs(&self, other: &ProductState) -> Result<f64, TensorError> {
        if self.dims != other.dims {
            return Err(TensorError::dims_mismatch(&self.dims, &other.dims));
        }
        Ok(self
            .factors
            .iter()
            .zip(&other.factors)
            .map(|(a, b)| linalg::dot(a, b).norm())
            .product())
    }
}

pub(crate) fn flatten_factors(factors: &[Vec<C64>]) -> Vec<C64> {
    let mut out = vec![C64::new(1.0, 0.0)];
    for f in factors {
        out = linalg::kron_vec(&out, f);
    }
    out
}

#[derive(Serialize, Deserialize)]
struct ProductStateRepr {
    dims: Vec<usize>,
    factors: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<ProductStateRepr> for ProductState {
    type Error = TensorError;

    fn try_from(repr: ProductStateRepr) -> Result<Self, Self::Error> {
        let factors: Vec<Vec<C64>> = repr
            .factors
            .into_iter()
            .map(|f| f.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        let state = ProductState::new(factors)?;
        if state.dims.as_slice() != repr.dims.as_slice() {
            return Err(TensorError::InvalidDims(format!(
                "declared dims {:?} do not match factor lengths {:?}",
                repr.dims,
                state.dims.as_slice()
            )));
        }
        Ok(state)
    }
}

impl From<ProductState> for ProductStateRepr {
    fn from(state: ProductState) -> Self {
        ProductStateRepr {
            dims: state.dims.as_slice().to_vec(),
            factors: state
                .factors
                .iter()
                .map(|f| f.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}
