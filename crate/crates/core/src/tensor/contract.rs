//! Contractions of full-space vectors against product-state factors.

use rayon::prelude::*;

use super::vector::flatten_factors;
use super::{ComplexVector, MultipartiteOperator, ProductState, SubsystemDims, TensorError};
use crate::C64;

const PARALLEL_ROWS: usize = 128;

/// `tr_N |psi><psi|` on the first N-1 subsystems.
///
/// `psi` reshaped to a (D/d_N) x d_N matrix `A` gives `A A^dagger`; the D x D
/// projector is never formed.
pub fn partial_trace_last(psi: &ComplexVector) -> Result<MultipartiteOperator, TensorError> {
    let dims = psi.dims();
    if dims.len() < 2 {
        return Err(TensorError::TooFewParties {
            needed: 2,
            actual: dims.len(),
        });
    }
    let reduced_dims = dims.prefix(dims.len() - 1)?;
    let cols = dims.last();
    let rows = reduced_dims.total();
    let a = psi.entries();

    let mut matrix = vec![C64::new(0.0, 0.0); rows * rows];
    let fill_row = |(r, out): (usize, &mut [C64])| {
        let ar = &a[r * cols..(r + 1) * cols];
        for s in r..rows {
            let as_ = &a[s * cols..(s + 1) * cols];
            let mut re = 0.0;
            let mut im = 0.0;
            for (x, y) in ar.iter().zip(as_) {
                // x * conj(y)
                re += x.re * y.re + x.im * y.im;
                im += x.im * y.re - x.re * y.im;
            }
            out[s] = C64::new(re, im);
        }
    };
    if rows >= PARALLEL_ROWS {
        matrix.par_chunks_mut(rows).enumerate().for_each(fill_row);
    } else {
        matrix.chunks_mut(rows).enumerate().for_each(fill_row);
    }
    for r in 0..rows {
        matrix[r * rows + r].im = 0.0;
        for s in r + 1..rows {
            matrix[s * rows + r] = matrix[r * rows + s].conj();
        }
    }
    Ok(MultipartiteOperator::from_parts_unchecked(reduced_dims, matrix))
}

/// `w[k] = <a_1, ..., a_{N-1}, k | psi>` for the computational basis of the
/// last subsystem. The result may be the zero vector.
pub fn project_out_component(
    psi: &ComplexVector,
    prefix: &ProductState,
) -> Result<Vec<C64>, TensorError> {
    let dims = psi.dims();
    if dims.len() < 2 {
        return Err(TensorError::TooFewParties {
            needed: 2,
            actual: dims.len(),
        });
    }
    if prefix.dims().as_slice() != &dims.as_slice()[..dims.len() - 1] {
        return Err(TensorError::dims_mismatch(&dims.prefix(dims.len() - 1)?, prefix.dims()));
    }
    let p = flatten_factors(prefix.factors());
    Ok(contract_prefix(psi.entries(), &p, dims.last()))
}

pub(crate) fn contract_prefix(psi: &[C64], prefix_flat: &[C64], last: usize) -> Vec<C64> {
    let mut w = vec![C64::new(0.0, 0.0); last];
    for (r, p) in prefix_flat.iter().enumerate() {
        let pc = p.conj();
        if pc == C64::new(0.0, 0.0) {
            continue;
        }
        for (wk, x) in w.iter_mut().zip(&psi[r * last..(r + 1) * last]) {
            *wk += pc * x;
        }
    }
    w
}

/// Contracts `v` with the conjugates of every factor except the `j`-th
/// (0-based); returns a vector on subsystem `j`.
pub(crate) fn contract_except(
    v: &[C64],
    dims: &SubsystemDims,
    factors: &[Vec<C64>],
    j: usize,
) -> Vec<C64> {
    let dj = dims.get(j);
    let (_, right_size) = dims.outer_sizes(j);
    let left = flatten_factors(&factors[..j]);
    let right = flatten_factors(&factors[j + 1..]);
    let mut out = vec![C64::new(0.0, 0.0); dj];
    for (l, lf) in left.iter().enumerate() {
        let lc = lf.conj();
        if lc == C64::new(0.0, 0.0) {
            continue;
        }
        for (x, o) in out.iter_mut().enumerate() {
            let base = (l * dj + x) * right_size;
            let mut acc = C64::new(0.0, 0.0);
            for (rf, z) in right.iter().zip(&v[base..base + right_size]) {
                acc += rf.conj() * z;
            }
            *o += lc * acc;
        }
    }
    out
}
