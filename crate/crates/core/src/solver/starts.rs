use std::f64::consts::FRAC_1_SQRT_2;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{spi_solve, SolverError, SpiConfig, StartStrategy};
use crate::linalg;
use crate::tensor::{LinearAction, MultipartiteOperator, ProductState, SubsystemDims};
use crate::C64;

/// Largest operator-basis start set that will be materialized.
pub const MAX_OPERATOR_BASIS_STARTS: usize = 1 << 20;

/// Identity offset for the projector in [`projection_start`]; any positive
/// value has the same maximizer.
pub const PROJECTION_SHIFT: f64 = 1e-6;

/// `shift * 1 + |v><v|` for a unit vector `v`, without forming the matrix.
#[derive(Debug, Clone)]
pub struct ProjectorShift {
    dims: SubsystemDims,
    v: Vec<C64>,
    shift: f64,
}

impl ProjectorShift {
    /// `1 + |v><v|`.
    pub fn new(dims: SubsystemDims, v: Vec<C64>) -> Result<Self, SolverError> {
        Self::with_shift(dims, v, 1.0)
    }

    /// `shift * 1 + |v><v|`, with `v` normalized first.
    pub fn with_shift(dims: SubsystemDims, mut v: Vec<C64>, shift: f64) -> Result<Self, SolverError> {
        if v.len() != dims.total() {
            return Err(crate::TensorError::LengthMismatch {
                expected: dims.total(),
                actual: v.len(),
            }
            .into());
        }
        if linalg::normalize(&mut v) == 0.0 {
            return Err(crate::TensorError::ZeroVector("projector vector".into()).into());
        }
        Ok(Self { dims, v, shift })
    }
}

impl LinearAction for ProjectorShift {
    fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        let c = linalg::dot(&self.v, x);
        for ((yi, xi), vi) in y.iter_mut().zip(x).zip(&self.v) {
            *yi = xi * self.shift + vi * c;
        }
    }
}

/// The d^2 local states `|k>`, `(|k>+|l>)/sqrt2`, `(|k>+i|l>)/sqrt2` (k < l),
/// in that order; their projectors span the d x d matrices.
pub fn local_operator_basis(d: usize) -> Vec<Vec<C64>> {
    let zero = C64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        let mut v = vec![zero; d];
        v[k] = C64::new(1.0, 0.0);
        out.push(v);
    }
    for phase in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
        for k in 0..d {
            for l in k + 1..d {
                let mut v = vec![zero; d];
                v[k] = C64::new(FRAC_1_SQRT_2, 0.0);
                v[l] = phase * FRAC_1_SQRT_2;
                out.push(v);
            }
        }
    }
    out
}

/// `prod_j d_j^2`, or `None` on overflow.
pub fn operator_basis_len(dims: &SubsystemDims) -> Option<usize> {
    dims.as_slice()
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d.checked_mul(d)?))
}

/// The `index`-th operator-basis product (lexicographic, subsystem 1
/// slowest). Indices wrap around.
pub fn operator_basis_state(
    dims: &SubsystemDims,
    index: usize,
) -> Result<ProductState, SolverError> {
    let mut rest = match operator_basis_len(dims) {
        Some(n) => index % n,
        None => index,
    };
    let mut factors = vec![Vec::new(); dims.len()];
    for j in (0..dims.len()).rev() {
        let d = dims.get(j);
        let m = d * d;
        factors[j] = local_state(d, rest % m);
        rest /= m;
    }
    Ok(ProductState::new(factors)?)
}

fn local_state(d: usize, i: usize) -> Vec<C64> {
    let zero = C64::new(0.0, 0.0);
    let mut v = vec![zero; d];
    if i < d {
        v[i] = C64::new(1.0, 0.0);
        return v;
    }
    let pairs = d * (d - 1) / 2;
    let (phase, mut p) = if i - d < pairs {
        (C64::new(1.0, 0.0), i - d)
    } else {
        (C64::new(0.0, 1.0), i - d - pairs)
    };
    for k in 0..d {
        let row = d - k - 1;
        if p < row {
            v[k] = C64::new(FRAC_1_SQRT_2, 0.0);
            v[k + 1 + p] = phase * FRAC_1_SQRT_2;
            return v;
        }
        p -= row;
    }
    unreachable!("local basis index out of range")
}

/// Product of independent complex Gaussian factors, normalized; entries are
/// drawn factor by factor, real part before imaginary part.
pub fn random_product_state(dims: &SubsystemDims, seed: u64) -> ProductState {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let factors = dims
        .as_slice()
        .iter()
        .map(|&d| {
            let mut f: Vec<C64> = (0..d)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    C64::new(re, im)
                })
                .collect();
            linalg::normalize(&mut f);
            f
        })
        .collect();
    ProductState::new(factors).expect("normalized Gaussian factors")
}

/// Starting vectors for the configured strategy, in deterministic order.
pub fn starting_vectors(
    op: &MultipartiteOperator,
    strategy: &StartStrategy,
    cfg: &SpiConfig,
) -> Result<Vec<ProductState>, SolverError> {
    match strategy {
        StartStrategy::OperatorBasis => operator_basis(op.dims()),
        StartStrategy::EigenvectorProjection => {
            let eigen = op.eigen();
            let (_, v) = eigen.max();
            Ok(vec![projection_start(op.dims(), v, cfg)?])
        }
        StartStrategy::Explicit(states) => {
            if states.is_empty() {
                return Err(SolverError::NoStartingVectors);
            }
            for s in states {
                if s.dims() != op.dims() {
                    return Err(crate::TensorError::dims_mismatch(op.dims(), s.dims()).into());
                }
            }
            Ok(states.clone())
        }
    }
}

pub(crate) fn operator_basis(dims: &SubsystemDims) -> Result<Vec<ProductState>, SolverError> {
    let count = operator_basis_len(dims).unwrap_or(usize::MAX);
    if count > MAX_OPERATOR_BASIS_STARTS {
        return Err(SolverError::TooManyStarts {
            count,
            limit: MAX_OPERATOR_BASIS_STARTS,
        });
    }
    (0..count).map(|i| operator_basis_state(dims, i)).collect()
}

/// The product state maximally parallel to `v`, found by SPI on
/// `PROJECTION_SHIFT * 1 + |v><v|` from a seeded random product state.
pub(crate) fn projection_start(
    dims: &SubsystemDims,
    v: &[C64],
    cfg: &SpiConfig,
) -> Result<ProductState, SolverError> {
    let proj = ProjectorShift::with_shift(dims.clone(), v.to_vec(), PROJECTION_SHIFT)?;
    let start = random_product_state(dims, cfg.seed);
    Ok(spi_solve(&proj, &start, cfg)?.state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_basis_matches_indexed_states() {
        for d in 1..=5 {
            let basis = local_operator_basis(d);
            assert_eq!(basis.len(), d * d);
            for (i, v) in basis.iter().enumerate() {
                assert_eq!(&local_state(d, i), v, "d={d} i={i}");
                assert!((linalg::norm(v) - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn local_projectors_span_operator_space() {
        // rank of the d^2 x d^2 matrix whose rows are vec(|v><v|)
        for d in 2..=4 {
            let rows: Vec<Vec<C64>> = local_operator_basis(d)
                .iter()
                .map(|v| {
                    let mut r = Vec::with_capacity(d * d);
                    for a in v {
                        for b in v {
                            r.push(a * b.conj());
                        }
                    }
                    r
                })
                .collect();
            assert_eq!(rank(rows), d * d);
        }
    }

    fn rank(mut m: Vec<Vec<C64>>) -> usize {
        let cols = m[0].len();
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..m.len()).max_by(|&a, &b| m[a][c].norm().total_cmp(&m[b][c].norm()))
            else {
                break;
            };
            if m[p][c].norm() < 1e-10 {
                continue;
            }
            m.swap(r, p);
            let pivot = m[r][c];
            for i in 0..m.len() {
                if i != r {
                    let f = m[i][c] / pivot;
                    let row_r = m[r].clone();
                    for (x, y) in m[i].iter_mut().zip(&row_r) {
                        *x -= f * y;
                    }
                }
            }
            r += 1;
        }
        r
    }

    #[test]
    fn operator_basis_counts() {
        let q = SubsystemDims::new(vec![2, 2]).unwrap();
        assert_eq!(operator_basis(&q).unwrap().len(), 16);
        let t = SubsystemDims::new(vec![3, 3]).unwrap();
        let states = operator_basis(&t).unwrap();
        assert_eq!(states.len(), 81);
        for s in &states {
            assert!((s.flatten().norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn operator_basis_is_lexicographic() {
        let dims = SubsystemDims::new(vec![2, 3]).unwrap();
        let states = operator_basis(&dims).unwrap();
        let b2 = local_operator_basis(2);
        let b3 = local_operator_basis(3);
        let mut k = 0;
        for x in &b2 {
            for y in &b3 {
                assert_eq!(states[k].factor(0), x.as_slice());
                assert_eq!(states[k].factor(1), y.as_slice());
                k += 1;
            }
        }
    }

    #[test]
    fn oversized_basis_is_refused() {
        let dims = SubsystemDims::qubits(11).unwrap();
        assert!(matches!(
            operator_basis(&dims),
            Err(SolverError::TooManyStarts { .. })
        ));
    }

    #[test]
    fn random_product_state_is_seeded() {
        let dims = SubsystemDims::new(vec![2, 3]).unwrap();
        assert_eq!(random_product_state(&dims, 5), random_product_state(&dims, 5));
        assert_ne!(random_product_state(&dims, 5), random_product_state(&dims, 6));
    }

    #[test]
    fn projector_offset_does_not_move_the_maximizer() {
        let dims = SubsystemDims::new(vec![2, 3]).unwrap();
        let mut v = random_product_state(&dims, 4).flatten().into_entries();
        let w = random_product_state(&dims, 5).flatten().into_entries();
        v.iter_mut().zip(&w).for_each(|(a, b)| *a += b * 0.6);
        let cfg = SpiConfig::default();
        let start = random_product_state(&dims, 6);
        let unit = ProjectorShift::new(dims.clone(), v.clone()).unwrap();
        let small = ProjectorShift::with_shift(dims.clone(), v, PROJECTION_SHIFT).unwrap();
        let a = spi_solve(&unit, &start, &cfg).unwrap();
        let b = spi_solve(&small, &start, &cfg).unwrap();
        assert!(a.converged && b.converged);
        assert!((a.g - 1.0 - (b.g - PROJECTION_SHIFT)).abs() < 1e-8);
        assert!(a.state.overlap_abs(&b.state).unwrap() > 1.0 - 1e-8);
    }
}
