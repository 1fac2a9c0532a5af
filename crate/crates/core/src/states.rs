//! Named operators and states: the swap operator, the Horodecki and Smolin
//! states, Pauli matrices, and seeded random positive operators.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tensor::{MultipartiteOperator, SubsystemDims, TensorError};
use crate::witness::DensityOperator;
use crate::C64;

/// Generator behind [`random_operator`]; part of its reproducibility contract.
pub const RANDOM_GENERATOR: &str = "ChaCha20 (rand_chacha 0.3), StandardNormal (rand_distr 0.4)";

const PARALLEL_ROWS: usize = 64;

#[derive(Debug, Error)]
pub enum StatesError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("{name} = {value} is outside {range}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("{0}")]
    NotDensity(String),
    #[error("invalid state name {0:?}; expected smolin, horodecki:<alpha>, swap:<d> or random:<dims>:<seed>")]
    UnknownName(String),
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// The permutation `V|a_1, a_2> = |a_2, a_1>` on d x d.
pub fn swap_permutation(d: usize) -> Result<MultipartiteOperator, StatesError> {
    let dims = SubsystemDims::new(vec![d, d])?;
    Ok(MultipartiteOperator::from_upper_fn(dims, |r, s| {
        if s == (r % d) * d + r / d {
            c(1.0)
        } else {
            c(0.0)
        }
    }))
}

/// `2 * 1 - V` on d x d.
pub fn swap_operator(d: usize) -> Result<MultipartiteOperator, StatesError> {
    if d < 2 {
        return Err(StatesError::OutOfDomain {
            name: "d",
            value: d as f64,
            range: "d >= 2",
        });
    }
    Ok(swap_permutation(d)?.scaled(-1.0).shifted(2.0))
}

/// `(2|Psi><Psi| + alpha s_+ + (5 - alpha) s_-) / 7` on 3 x 3, with
/// `|Psi> = (|00> + |11> + |22>)/sqrt3`, `s_+` the uniform mixture of
/// `|01>, |12>, |20>` and `s_-` of `|10>, |21>, |02>`.
pub fn horodecki_state(alpha: f64) -> Result<DensityOperator, StatesError> {
    if !(0.0..=5.0).contains(&alpha) {
        return Err(StatesError::OutOfDomain {
            name: "alpha",
            value: alpha,
            range: "[0, 5]",
        });
    }
    let dims = SubsystemDims::new(vec![3, 3])?;
    let idx = |i: usize, j: usize| 3 * i + j;
    let mut m = vec![c(0.0); 81];
    for a in 0..3 {
        for b in 0..3 {
            m[idx(a, a) * 9 + idx(b, b)] = c(2.0 / 3.0 / 7.0);
        }
    }
    for k in 0..3 {
        let plus = idx(k, (k + 1) % 3);
        let minus = idx((k + 1) % 3, k);
        m[plus * 9 + plus] += c(alpha / 3.0 / 7.0);
        m[minus * 9 + minus] += c((5.0 - alpha) / 3.0 / 7.0);
    }
    DensityOperator::new(MultipartiteOperator::new(dims, m)?)
        .map_err(|e| StatesError::NotDensity(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pauli {
    Id,
    X,
    Y,
    Z,
}

/// Pauli matrix on one qubit, `sigma_y = [[0, -i], [i, 0]]`.
pub fn pauli(kind: Pauli) -> MultipartiteOperator {
    let i = C64::new(0.0, 1.0);
    let (o, z) = (c(1.0), c(0.0));
    let m = match kind {
        Pauli::Id => vec![o, z, z, o],
        Pauli::X => vec![z, o, o, z],
        Pauli::Y => vec![z, -i, i, z],
        Pauli::Z => vec![o, z, z, -o],
    };
    MultipartiteOperator::new(SubsystemDims::qubits(1).expect("one qubit"), m)
        .expect("Pauli matrices are Hermitian")
}

/// `m (x) m (x) ... (x) m`, n factors.
pub fn kron_power(m: &MultipartiteOperator, n: usize) -> Result<MultipartiteOperator, StatesError> {
    if n == 0 {
        return Err(StatesError::OutOfDomain {
            name: "n",
            value: 0.0,
            range: "n >= 1",
        });
    }
    let mut out = m.clone();
    for _ in 1..n {
        out = out.kron(m);
    }
    Ok(out)
}

/// `(1 + X^4 + Y^4 + Z^4) / 16` on four qubits.
pub fn smolin_state() -> DensityOperator {
    let mut s = MultipartiteOperator::identity(SubsystemDims::qubits(4).expect("four qubits"));
    for p in [Pauli::X, Pauli::Y, Pauli::Z] {
        let term = kron_power(&pauli(p), 4).expect("n = 4");
        s = s.add_scaled(&term, 1.0).expect("same dims");
    }
    DensityOperator::new(s.scaled(1.0 / 16.0)).expect("Smolin state is a density operator")
}

/// Seed and dimensions of a random test operator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomOperatorSpec {
    pub dims: SubsystemDims,
    pub seed: u64,
}

impl RandomOperatorSpec {
    pub fn new(dims: SubsystemDims, seed: u64) -> Self {
        Self { dims, seed }
    }

    /// The D x D matrix `M`, row-major, real part drawn before imaginary part.
    pub fn gaussian_matrix(&self) -> Vec<C64> {
        let d = self.dims.total();
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        (0..d * d)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                C64::new(re, im)
            })
            .collect()
    }
}

/// `(1 + M M^dagger) / tr(1 + M M^dagger)` with Gaussian `M`.
pub fn random_operator(spec: &RandomOperatorSpec) -> MultipartiteOperator {
    random_operator_from(spec.dims.clone(), &spec.gaussian_matrix())
        .expect("generated matrix has matching size")
}

/// Same normalization for a caller-supplied row-major `M`.
pub fn random_operator_from(
    dims: SubsystemDims,
    m: &[C64],
) -> Result<MultipartiteOperator, StatesError> {
    let d = dims.total();
    if m.len() != d * d {
        return Err(TensorError::LengthMismatch {
            expected: d * d,
            actual: m.len(),
        }
        .into());
    }
    let mut gram = vec![c(0.0); d * d];
    let fill_row = |(i, out): (usize, &mut [C64])| {
        let ri = &m[i * d..(i + 1) * d];
        for (j, o) in out.iter_mut().enumerate().skip(i) {
            let rj = &m[j * d..(j + 1) * d];
            let mut re = 0.0;
            let mut im = 0.0;
            for (x, y) in ri.iter().zip(rj) {
                re += x.re * y.re + x.im * y.im;
                im += x.im * y.re - x.re * y.im;
            }
            *o = C64::new(re, im);
        }
    };
    if d >= PARALLEL_ROWS {
        gram.par_chunks_mut(d).enumerate().for_each(fill_row);
    } else {
        gram.chunks_mut(d).enumerate().for_each(fill_row);
    }
    let trace = d as f64 + (0..d).map(|i| gram[i * d + i].re).sum::<f64>();
    Ok(MultipartiteOperator::from_upper_fn(dims, |i, j| {
        let v = if i == j {
            c(1.0 + gram[i * d + i].re)
        } else {
            gram[i * d + j]
        };
        v / trace
    }))
}

/// A named operator: `smolin`, `horodecki:<alpha>`, `swap:<d>` or
/// `random:<d1>x<d2>...:<seed>`.
#[derive(Debug, Clone, PartialEq)]
pub enum NamedState {
    Smolin,
    Horodecki(f64),
    Swap(usize),
    Random(RandomOperatorSpec),
}

impl NamedState {
    pub fn operator(&self) -> Result<MultipartiteOperator, StatesError> {
        Ok(match self {
            NamedState::Smolin => smolin_state().into_operator(),
            NamedState::Horodecki(a) => horodecki_state(*a)?.into_operator(),
            NamedState::Swap(d) => swap_operator(*d)?,
            NamedState::Random(spec) => random_operator(spec),
        })
    }
}

impl FromStr for NamedState {
    type Err = StatesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || StatesError::UnknownName(s.to_string());
        let mut parts = s.trim().split(':');
        let kind = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        match (kind, args.as_slice()) {
            ("smolin", []) => Ok(NamedState::Smolin),
            ("horodecki", [a]) => Ok(NamedState::Horodecki(a.parse().map_err(|_| unknown())?)),
            ("swap", [d]) => Ok(NamedState::Swap(d.parse().map_err(|_| unknown())?)),
            ("random", [dims, seed]) => {
                let dims = dims
                    .split('x')
                    .map(|d| d.parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| unknown())?;
                Ok(NamedState::Random(RandomOperatorSpec::new(
                    SubsystemDims::new(dims)?,
                    seed.parse().map_err(|_| unknown())?,
                )))
            }
            _ => Err(unknown()),
        }
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedState::Smolin => write!(f, "smolin"),
            NamedState::Horodecki(a) => write!(f, "horodecki:{a}"),
            NamedState::Swap(d) => write!(f, "swap:{d}"),
            NamedState::Random(spec) => write!(f, "random:{}:{}", spec.dims, spec.seed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::LinearAction;
    use crate::ProductState;

    #[test]
    fn swap_spectrum_and_action() {
        let l = swap_operator(2).unwrap();
        let ev = l.eigenvalues();
        for (x, y) in ev.iter().zip([1.0, 1.0, 1.0, 3.0]) {
            assert!((x - y).abs() < 1e-12);
        }
        let v = swap_permutation(2).unwrap();
        let s01 = ProductState::basis(v.dims(), &[0, 1]).unwrap().flatten();
        let s10 = ProductState::basis(v.dims(), &[1, 0]).unwrap().flatten();
        assert_eq!(v.apply(&s01).unwrap(), s10);
        assert!(swap_operator(1).is_err());
    }

    #[test]
    fn pauli_conventions() {
        let z = pauli(Pauli::Z);
        assert_eq!(z.as_slice(), &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
        let xx = kron_power(&pauli(Pauli::X), 2).unwrap();
        let e0 = [c(1.0), c(0.0), c(0.0), c(0.0)];
        assert_eq!(xx.apply_vec(&e0), vec![c(0.0), c(0.0), c(0.0), c(1.0)]);
        let y4 = kron_power(&pauli(Pauli::Y), 4).unwrap();
        assert!(y4.as_slice().iter().all(|z| z.im.abs() < 1e-15));
        assert!(kron_power(&z, 0).is_err());
    }

    #[test]
    fn horodecki_domain_and_trace() {
        assert!(horodecki_state(-0.1).is_err());
        assert!(horodecki_state(5.1).is_err());
        for k in 0..=50 {
            let rho = horodecki_state(k as f64 / 10.0).unwrap();
            assert!((rho.operator().trace() - 1.0).abs() < 1e-12);
            assert!(rho.min_eigenvalue() > -1e-12);
        }
    }

    #[test]
    fn smolin_purity() {
        let s = smolin_state();
        let p = s.operator().trace_product(s.operator()).unwrap();
        assert!((p - 0.25).abs() < 1e-14);
    }

    #[test]
    fn random_operator_is_normalized_and_seeded() {
        let spec = RandomOperatorSpec::new(SubsystemDims::new(vec![2, 3]).unwrap(), 9);
        let l = random_operator(&spec);
        assert!((l.trace() - 1.0).abs() < 1e-12);
        assert!(l.eigenvalues()[0] > 0.0);
        assert_eq!(l, random_operator(&spec));
        let zero = vec![c(0.0); 36];
        let flat = random_operator_from(spec.dims.clone(), &zero).unwrap();
        assert_eq!(flat, MultipartiteOperator::scaled_identity(spec.dims, 1.0 / 6.0));
    }

    #[test]
    fn parallel_gram_matches_serial() {
        let spec = RandomOperatorSpec::new(SubsystemDims::new(vec![8, 8]).unwrap(), 1);
        let m = spec.gaussian_matrix();
        let l = random_operator(&spec);
        let d = 64;
        let mut tr = d as f64;
        for v in &m {
            tr += v.norm_sqr();
        }
        for (i, j) in [(0, 0), (3, 17), (63, 2)] {
            let mut g: C64 = (0..d).map(|k| m[i * d + k] * m[j * d + k].conj()).sum();
            if i == j {
                g += 1.0;
            }
            assert!((l.entry(i, j) - g / tr).norm() < 1e-15);
        }
    }

    #[test]
    fn names_round_trip() {
        for s in ["smolin", "horodecki:2.5", "swap:3", "random:2x3:42"] {
            let n: NamedState = s.parse().unwrap();
            assert_eq!(n.to_string(), s);
        }
        for bad in ["", "ghz", "swap", "swap:x", "random:2x2", "horodecki:1:2"] {
            assert!(bad.parse::<NamedState>().is_err(), "{bad}");
        }
    }
}
