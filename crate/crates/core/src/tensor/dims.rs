use serde::{Deserialize, Serialize};
use std::fmt;

use super::TensorError;

/// Ordered list of subsystem dimensions `d_1, ..., d_N`.
///
/// Flat indices are big-endian: subsystem 1 is the slowest-varying index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SubsystemDims {
    dims: Vec<usize>,
    total: usize,
}

impl SubsystemDims {
    pub fn new(dims: Vec<usize>) -> Result<Self, TensorError> {
        if dims.is_empty() {
            return Err(TensorError::InvalidDims("at least one subsystem is required".into()));
        }
        let mut total = 1usize;
        for (j, &d) in dims.iter().enumerate() {
            if d == 0 {
                return Err(TensorError::InvalidDims(format!(
                    "subsystem {} has dimension 0",
                    j + 1
                )));
            }
            total = total.checked_mul(d).ok_or_else(|| {
                TensorError::InvalidDims("total dimension overflows usize".into())
            })?;
        }
        Ok(Self { dims, total })
    }

    /// `n` qubits.
    pub fn qubits(n: usize) -> Result<Self, TensorError> {
        Self::new(vec![2; n])
    }

    /// Number of subsystems N.
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Total dimension D = prod d_j.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn get(&self, j: usize) -> usize {
        self.dims[j]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.dims
    }

    pub fn last(&self) -> usize {
        self.dims[self.dims.len() - 1]
    }

    /// Dimensions of the first `n` subsystems.
    pub fn prefix(&self, n: usize) -> Result<Self, TensorError> {
        Self::new(self.dims[..n].to_vec())
    }

    /// Product of the dimensions strictly before and strictly after subsystem `j`.
    pub(crate) fn outer_sizes(&self, j: usize) -> (usize, usize) {
        let left = self.dims[..j].iter().product();
        let right = self.dims[j + 1..].iter().product();
        (left, right)
    }

    /// Splits a flat index into per-subsystem indices.
    pub fn unflatten_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        for (slot, &d) in idx.iter_mut().zip(&self.dims).rev() {
            *slot = flat % d;
            flat /= d;
        }
        idx
    }

    pub fn flatten_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| acc * d + i)
    }
}

impl TryFrom<Vec<usize>> for SubsystemDims {
    type Error = TensorError;

    fn try_from(dims: Vec<usize>) -> Result<Self, Self::Error> {
        Self::new(dims)
    }
}

impl From<SubsystemDims> for Vec<usize> {
    fn from(dims: SubsystemDims) -> Self {
        dims.dims
    }
}

impl fmt::Display for SubsystemDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_is_product() {
        let dims = SubsystemDims::new(vec![2, 3, 4]).unwrap();
        assert_eq!(dims.total(), 24);
        assert_eq!(dims.len(), 3);
        assert_eq!(dims.to_string(), "2x3x4");
    }

    #[test]
    fn rejects_empty_and_zero() {
        assert!(SubsystemDims::new(vec![]).is_err());
        assert!(SubsystemDims::new(vec![2, 0]).is_err());
    }

    #[test]
    fn index_round_trip_is_big_endian() {
        let dims = SubsystemDims::new(vec![2, 3, 2]).unwrap();
        assert_eq!(dims.unflatten_index(1), vec![0, 0, 1]);
        assert_eq!(dims.unflatten_index(2), vec![0, 1, 0]);
        assert_eq!(dims.unflatten_index(6), vec![1, 0, 0]);
        for flat in 0..dims.total() {
            assert_eq!(dims.flatten_index(&dims.unflatten_index(flat)), flat);
        }
    }
}
