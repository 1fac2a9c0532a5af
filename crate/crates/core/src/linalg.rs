//! Small dense kernels shared by the tensor and solver layers, plus the
//! Hermitian eigensolver used for spectra and dominant eigenvectors.

use faer::complex_native::c64;
use faer::{Mat, Side};

use crate::C64;

/// `<a|b>`, antilinear in the first argument.
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    C64::new(re, im)
}

pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    norm_sqr(a).sqrt()
}

/// Largest entry magnitude.
pub fn max_abs(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Scales `a` to unit norm and returns the previous norm. A zero vector is
/// left untouched.
pub fn normalize(a: &mut [C64]) -> f64 {
    let n = norm(a);
    if n > 0.0 {
        let inv = 1.0 / n;
        a.iter_mut().for_each(|z| *z *= inv);
    }
    n
}

/// Multiplies `a` by a unit phase so that its largest-magnitude entry is real
/// and positive (first such entry on exact ties).
pub fn canonicalize_phase(a: &mut [C64]) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (k, z) in a.iter().enumerate() {
        let m = z.norm_sqr();
        if m > best_mag {
            best = k;
            best_mag = m;
        }
    }
    if best_mag <= 0.0 {
        return;
    }
    let pivot = a[best];
    let phase = pivot.conj() / pivot.norm();
    a.iter_mut().for_each(|z| *z *= phase);
    a[best] = C64::new(a[best].norm(), 0.0);
}

/// Kronecker product of two vectors, `a` slowest.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        out.extend(b.iter().map(|y| x * y));
    }
    out
}

/// Row-major `n x n` product `a b`.
pub fn matmul(n: usize, a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        let row = &mut out[i * n..(i + 1) * n];
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, bkj) in row.iter_mut().zip(&b[k * n..(k + 1) * n]) {
                *o += aik * bkj;
            }
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Eigenvectors, `vectors[k]` belongs to `values[k]`.
    pub vectors: Vec<Vec<C64>>,
}

impl HermitianEigen {
    pub fn max(&self) -> (f64, &[C64]) {
        let k = self.values.len() - 1;
        (self.values[k], &self.vectors[k])
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }
}

fn to_faer(n: usize, data: &[C64]) -> Mat<c64> {
    assert_eq!(data.len(), n * n, "matrix buffer does not hold n x n entries");
    Mat::from_fn(n, n, |i, j| {
        let z = data[i * n + j];
        c64::new(z.re, z.im)
    })
}

/// Full eigendecomposition of the Hermitian row-major `n x n` matrix. Only the
/// lower triangle is read.
pub fn hermitian_eigen(n: usize, data: &[C64]) -> HermitianEigen {
    let evd = to_faer(n, data).selfadjoint_eigendecomposition(Side::Lower);
    let s: Vec<f64> = (0..n).map(|k| evd.s().column_vector().read(k).re).collect();
    let u = evd.u();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| s[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut v: Vec<C64> = (0..n)
                .map(|i| {
                    let z = u.read(i, k);
                    C64::new(z.re, z.im)
                })
                .collect();
            canonicalize_phase(&mut v);
            v
        })
        .collect();
    HermitianEigen { values, vectors }
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(n: usize, data: &[C64]) -> Vec<f64> {
    let mut values = to_faer(n, data).selfadjoint_eigenvalues(Side::Lower);
    values.sort_by(f64::total_cmp);
    values
}
