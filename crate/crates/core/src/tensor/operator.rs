use rayon::prelude::*;

use super::vector::flatten_factors;
use super::{ComplexVector, ProductState, SubsystemDims, TensorError};
use crate::linalg;
use crate::C64;

/// Tolerance for the Hermiticity check on construction (max-abs deviation).
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Allowed imaginary part of a quadratic form, relative to `max(1, |value|)`.
pub const QUADRATIC_FORM_IMAG_TOL: f64 = 1e-10;

/// Row count from which matrix-vector products are split across threads.
const PARALLEL_ROWS: usize = 256;

/// Anything that can act linearly on a vector of the full tensor-product
/// space. The solvers only need this action plus the subsystem structure.
pub trait LinearAction: Sync {
    fn dims(&self) -> &SubsystemDims;

    /// Writes `A x` into `y`. Both slices have length `dims().total()`.
    fn apply_into(&self, x: &[C64], y: &mut [C64]);

    fn apply_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); x.len()];
        self.apply_into(x, &mut y);
        y
    }
}

/// Dense Hermitian operator on a tensor-product space, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipartiteOperator {
    dims: SubsystemDims,
    matrix: Vec<C64>,
}

impl MultipartiteOperator {
    /// Validates shape and Hermiticity. Inputs are rejected, never symmetrized.
    pub fn new(dims: SubsystemDims, matrix: Vec<C64>) -> Result<Self, TensorError> {
        let d = dims.total();
        if matrix.len() != d * d {
            return Err(TensorError::LengthMismatch {
                expected: d * d,
                actual: matrix.len(),
            });
        }
        let op = Self { dims, matrix };
        if let Some((row, col, deviation)) = op.worst_hermitian_deviation() {
            if deviation > HERMITIAN_TOL {
                return Err(TensorError::NotHermitian { row, col, deviation });
            }
        }
        Ok(op)
    }

    /// Caller guarantees exact (or rounding-level) Hermiticity.
    pub(crate) fn from_parts_unchecked(dims: SubsystemDims, matrix: Vec<C64>) -> Self {
        debug_assert_eq!(matrix.len(), dims.total() * dims.total());
        Self { dims, matrix }
    }

    /// Builds the operator from a function of `(row, col)` evaluated on the
    /// upper triangle; the lower triangle is mirrored so the result is exactly
    /// Hermitian. Diagonal entries keep only their real part.
    pub fn from_upper_fn(dims: SubsystemDims, f: impl Fn(usize, usize) -> C64) -> Self {
        let d = dims.total();
        let mut matrix = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            matrix[i * d + i] = C64::new(f(i, i).re, 0.0);
            for j in i + 1..d {
                let z = f(i, j);
                matrix[i * d + j] = z;
                matrix[j * d + i] = z.conj();
            }
        }
        Self { dims, matrix }
    }

    pub fn identity(dims: SubsystemDims) -> Self {
        Self::scaled_identity(dims, 1.0)
    }

    pub fn scaled_identity(dims: SubsystemDims, value: f64) -> Self {
        let d = dims.total();
        let mut matrix = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            matrix[i * d + i] = C64::new(value, 0.0);
        }
        Self { dims, matrix }
    }

    pub fn zeros(dims: SubsystemDims) -> Self {
        let d = dims.total();
        Self {
            dims,
            matrix: vec![C64::new(0.0, 0.0); d * d],
        }
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    /// Total dimension D.
    pub fn dim(&self) -> usize {
        self.dims.total()
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[row * self.dim() + col]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.matrix
    }

    pub fn into_parts(self) -> (SubsystemDims, Vec<C64>) {
        (self.dims, self.matrix)
    }

    /// Same matrix, reinterpreted on a different factorization of D.
    pub fn with_dims(self, dims: SubsystemDims) -> Result<Self, TensorError> {
        if dims.total() != self.dims.total() {
            return Err(TensorError::dims_mismatch(&self.dims, &dims));
        }
        Ok(Self {
            dims,
            matrix: self.matrix,
        })
    }

    fn worst_hermitian_deviation(&self) -> Option<(usize, usize, f64)> {
        let d = self.dim();
        let mut worst: Option<(usize, usize, f64)> = None;
        for i in 0..d {
            for j in i..d {
                let dev = (self.matrix[i * d + j] - self.matrix[j * d + i].conj()).norm();
                if worst.map_or(true, |(_, _, w)| dev > w) {
                    worst = Some((i, j, dev));
                }
            }
        }
        worst
    }

    /// Max-abs deviation of the matrix from its conjugate transpose.
    pub fn hermitian_deviation(&self) -> f64 {
        self.worst_hermitian_deviation().map_or(0.0, |(_, _, w)| w)
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector, TensorError> {
        if v.dims() != &self.dims {
            return Err(TensorError::dims_mismatch(&self.dims, v.dims()));
        }
        Ok(ComplexVector::from_parts_unchecked(
            self.dims.clone(),
            self.apply_vec(v.entries()),
        ))
    }

    /// `<a|L|a>` for a product state.
    pub fn expectation(&self, state: &ProductState) -> Result<f64, TensorError> {
        if state.dims() != &self.dims {
            return Err(TensorError::dims_mismatch(&self.dims, state.dims()));
        }
        let flat = flatten_factors(state.factors());
        real_quadratic_form(&flat, &self.apply_vec(&flat))
    }

    /// The d_j x d_j operator `M[x, y] = <a_1..x..a_N| L |a_1..y..a_N>` with
    /// all factors but the `j`-th (0-based) contracted.
    pub fn reduced_operator(
        &self,
        state: &ProductState,
        j: usize,
    ) -> Result<MultipartiteOperator, TensorError> {
        if state.dims() != &self.dims {
            return Err(TensorError::dims_mismatch(&self.dims, state.dims()));
        }
        if j >= self.dims.len() {
            return Err(TensorError::SubsystemOutOfRange {
                index: j + 1,
                parties: self.dims.len(),
            });
        }
        let total = self.dim();
        let dj = self.dims.get(j);
        let (left_size, right_size) = self.dims.outer_sizes(j);
        let left = flatten_factors(&state.factors()[..j]);
        let right = flatten_factors(&state.factors()[j + 1..]);
        // weight of the flat index (l, x, r) for any slot value x
        let weight = |l: usize, r: usize| left[l] * right[r];
        let flat = |l: usize, x: usize, r: usize| (l * dj + x) * right_size + r;

        let mut reduced = vec![C64::new(0.0, 0.0); dj * dj];
        let mut row_acc = vec![C64::new(0.0, 0.0); total];
        for x in 0..dj {
            row_acc.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            for l in 0..left_size {
                for r in 0..right_size {
                    let w = weight(l, r).conj();
                    if w == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let n = flat(l, x, r);
                    let row = &self.matrix[n * total..(n + 1) * total];
                    for (acc, entry) in row_acc.iter_mut().zip(row) {
                        *acc += w * entry;
                    }
                }
            }
            for y in 0..dj {
                let mut sum = C64::new(0.0, 0.0);
                for l in 0..left_size {
                    for r in 0..right_size {
                        sum += row_acc[flat(l, y, r)] * weight(l, r);
                    }
                }
                reduced[x * dj + y] = sum;
            }
        }
        let dims = SubsystemDims::new(vec![dj])?;
        Ok(Self::from_upper_fn(dims, |x, y| {
            (reduced[x * dj + y] + reduced[y * dj + x].conj()) * 0.5
        }))
    }

    /// `self + shift * 1`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut out = self.clone();
        let d = out.dim();
        for i in 0..d {
            out.matrix[i * d + i] += shift;
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dims: self.dims.clone(),
            matrix: self.matrix.iter().map(|z| z * factor).collect(),
        }
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &Self, factor: f64) -> Result<Self, TensorError> {
        if self.dims != other.dims {
            return Err(TensorError::dims_mismatch(&self.dims, &other.dims));
        }
        Ok(Self {
            dims: self.dims.clone(),
            matrix: self
                .matrix
                .iter()
                .zip(&other.matrix)
                .map(|(a, b)| a + b * factor)
                .collect(),
        })
    }

    pub fn trace(&self) -> f64 {
        let d = self.dim();
        (0..d).map(|i| self.matrix[i * d + i].re).sum()
    }

    /// `tr(self other)`, real for a Hermitian pair.
    pub fn trace_product(&self, other: &Self) -> Result<f64, TensorError> {
        if self.dims.total() != other.dims.total() {
            return Err(TensorError::dims_mismatch(&self.dims, &other.dims));
        }
        let d = self.dim();
        let mut sum = 0.0;
        for i in 0..d {
            for j in 0..d {
                let a = self.matrix[i * d + j];
                let b = other.matrix[j * d + i];
                sum += a.re * b.re - a.im * b.im;
            }
        }
        Ok(sum)
    }

    /// `self (x) other` with `self` on the leading subsystems.
    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.dim(), other.dim());
        let d = da * db;
        let mut matrix = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..da {
            for j in 0..da {
                let a = self.matrix[i * da + j];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..db {
                    let row = (i * db + k) * d + j * db;
                    for l in 0..db {
                        matrix[row + l] = a * other.matrix[k * db + l];
                    }
                }
            }
        }
        let mut dims: Vec<usize> = self.dims.as_slice().to_vec();
        dims.extend_from_slice(other.dims.as_slice());
        Self {
            dims: SubsystemDims::new(dims).expect("concatenated valid dims"),
            matrix,
        }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(self.dim(), &self.matrix)
    }

    pub fn eigen(&self) -> linalg::HermitianEigen {
        linalg::hermitian_eigen(self.dim(), &self.matrix)
    }
}

impl LinearAction for MultipartiteOperator {
    fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        let d = self.dim();
        assert_eq!(x.len(), d);
        assert_eq!(y.len(), d);
        let row_dot = |(i, out): (usize, &mut C64)| {
            let row = &self.matrix[i * d..(i + 1) * d];
            let mut re = 0.0;
            let mut im = 0.0;
            for (a, b) in row.iter().zip(x) {
                re += a.re * b.re - a.im * b.im;
                im += a.re * b.im + a.im * b.re;
            }
            *out = C64::new(re, im);
        };
        if d >= PARALLEL_ROWS {
            y.par_iter_mut().enumerate().for_each(row_dot);
        } else {
            y.iter_mut().enumerate().for_each(row_dot);
        }
    }
}

/// Real part of `<a|b>` after checking the imaginary part is rounding-level.
pub(crate) fn real_quadratic_form(a: &[C64], la: &[C64]) -> Result<f64, TensorError> {
    let z = linalg::dot(a, la);
    if z.im.abs() > QUADRATIC_FORM_IMAG_TOL * z.re.abs().max(1.0) {
        return Err(TensorError::NotReal { imag: z.im });
    }
    Ok(z.re)
}
