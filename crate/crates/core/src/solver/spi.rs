use serde::{Deserialize, Serialize};

use super::starts::operator_basis_state;
use super::{power_iteration, SolverError, SpiConfig, StartStrategy};
use crate::linalg;
use crate::tensor::{
    contract_except, contract_prefix, flatten_factors, real_quadratic_form, LinearAction,
    MultipartiteOperator, ProductState, SubsystemDims, TensorError,
};
use crate::C64;

/// Backward projections shorter than this (relative to the normalized
/// `|Psi>`) count as vanishing.
const DEGENERATE_TOL: f64 = 1e-12;

/// Inner solves run to `INNER_TOLERANCE * target / max(1, ||Psi||)`, never
/// below `INNER_TOLERANCE_FLOOR`, so their error does not set a floor for the
/// outer residual. `target` is `epsilon` once the outer residual is within
/// `1 / INNER_TRACKING` of it, and `INNER_TRACKING` times that residual
/// before, capped at `INNER_TOLERANCE_CEIL`.
const INNER_TOLERANCE: f64 = 0.1;
const INNER_TOLERANCE_FLOOR: f64 = 1e-13;
const INNER_TOLERANCE_CEIL: f64 = 1e-3;
const INNER_TRACKING: f64 = 0.1;

/// Two-party cycles whose single-party inner power iteration has not
/// converged after `DENSE_FALLBACK_ITERS` steps diagonalize the inner
/// operator instead, up to this dimension.
const DENSE_BASE_MAX: usize = 64;
const DENSE_FALLBACK_ITERS: usize = 200;

/// Eigenvalues this close to the largest one share its eigenspace.
const DEGENERATE_EIGENVALUE_TOL: f64 = 1e-12;

/// Relative slack for the per-cycle sandwich check in debug builds.
const SANDWICH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpiResult {
    pub g: f64,
    pub state: ProductState,
    /// Final N-orthogonality residual.
    pub residual: f64,
    pub cycles: usize,
    /// `g` before the first cycle and after every cycle since the last restart.
    pub g_trace: Vec<f64>,
    pub start_index: usize,
    pub converged: bool,
    /// Restarts caused by a vanishing backward projection.
    #[serde(default)]
    pub restarts: usize,
}

/// One SPI cycle from `current`.
///
/// The returned factors are phase-canonical, which leaves `<new|L|current>`
/// real and non-negative up to a global phase; use its modulus.
pub fn spi_cycle<A: LinearAction + ?Sized>(
    op: &A,
    current: &ProductState,
    cfg: &SpiConfig,
) -> Result<ProductState, SolverError> {
    check_dims(op, current)?;
    let psi = op.apply_vec(&flatten_factors(current.factors()));
    cycle_from_psi(op, current, &psi, cfg, cfg.epsilon)
}

/// `target` is the accuracy the outer problem currently needs, at least `cfg.epsilon`.
fn cycle_from_psi<A: LinearAction + ?Sized>(
    op: &A,
    current: &ProductState,
    psi: &[C64],
    cfg: &SpiConfig,
    target: f64,
) -> Result<ProductState, SolverError> {
    let dims = op.dims();
    let n = dims.len();
    let mut psi_hat = psi.to_vec();
    let norm = linalg::normalize(&mut psi_hat);
    if norm == 0.0 {
        return Err(SolverError::DegenerateProjection { norm });
    }
    if n == 1 {
        return Ok(ProductState::new(vec![psi_hat])?.canonical_phase());
    }
    let reduced = GramShift::new(dims.prefix(n - 1)?, psi_hat, dims.last(), cfg.inner_shift);
    let epsilon = inner_epsilon(target, norm);
    let inner_cfg = SpiConfig {
        epsilon,
        max_cycles: cfg.max_cycles,
        pi_epsilon: cfg.pi_epsilon,
        pi_max_iters: cfg.pi_max_iters,
        start_strategy: StartStrategy::OperatorBasis,
        seed: cfg.seed,
        inner_shift: cfg.inner_shift,
    };
    let inner = if n == 2 && reduced.dims.total() <= DENSE_BASE_MAX {
        let capped = SpiConfig {
            pi_max_iters: inner_cfg.pi_max_iters.min(DENSE_FALLBACK_ITERS),
            ..inner_cfg
        };
        let pi = power_iteration(&reduced, current.factor(0), &capped)?;
        let z = if pi.converged {
            pi.vector
        } else {
            let eigen = linalg::hermitian_eigen(reduced.dims.total(), &reduced.dense());
            top_eigenvector_near(&eigen, &pi.vector)
        };
        ProductState::new(vec![z])?
    } else {
        spi_solve(&reduced, &current.prefix(n - 1)?, &inner_cfg)?.state
    };
    let mut last = contract_prefix(&reduced.a, &flatten_factors(inner.factors()), dims.last());
    let w = linalg::normalize(&mut last);
    if w < DEGENERATE_TOL {
        return Err(SolverError::DegenerateProjection { norm: w });
    }
    Ok(inner.extended(last)?.canonical_phase())
}

/// The component of `warm` in the top eigenspace, or the top eigenvector if
/// that component vanishes. Keeps consecutive cycles continuous when the
/// largest eigenvalue is degenerate.
fn top_eigenvector_near(eigen: &linalg::HermitianEigen, warm: &[C64]) -> Vec<C64> {
    let (top, v) = eigen.max();
    let mut z = vec![C64::new(0.0, 0.0); warm.len()];
    for (value, u) in eigen.values.iter().zip(&eigen.vectors) {
        if top - value <= DEGENERATE_EIGENVALUE_TOL {
            let c = linalg::dot(u, warm);
            z.iter_mut().zip(u).for_each(|(zi, ui)| *zi += ui * c);
        }
    }
    if linalg::normalize(&mut z) < DEGENERATE_TOL {
        return v.to_vec();
    }
    z
}

/// `A A^dagger + shift * 1` for `A` the (D/d_N) x d_N reshaping of a vector,
/// i.e. the partial trace over the last subsystem of its projector, applied
/// without forming the matrix.
struct GramShift {
    dims: SubsystemDims,
    a: Vec<C64>,
    cols: usize,
    shift: f64,
}

impl GramShift {
    fn new(dims: SubsystemDims, a: Vec<C64>, cols: usize, shift: f64) -> Self {
        Self { dims, a, cols, shift }
    }

    /// Row-major matrix.
    fn dense(&self) -> Vec<C64> {
        let rows: Vec<&[C64]> = self.a.chunks(self.cols).collect();
        let n = rows.len();
        let mut m = vec![C64::new(0.0, 0.0); n * n];
        for (i, ri) in rows.iter().enumerate() {
            for (j, rj) in rows.iter().enumerate() {
                m[i * n + j] = linalg::dot(rj, ri);
            }
            m[i * n + i] += self.shift;
        }
        m
    }
}

impl LinearAction for GramShift {
    fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        let cols = self.cols;
        let mut t = vec![C64::new(0.0, 0.0); cols];
        for (row, xr) in self.a.chunks(cols).zip(x) {
            for (tk, ark) in t.iter_mut().zip(row) {
                *tk += ark.conj() * xr;
            }
        }
        for ((row, xr), yr) in self.a.chunks(cols).zip(x).zip(y.iter_mut()) {
            let mut acc = xr * self.shift;
            for (ark, tk) in row.iter().zip(&t) {
                acc += ark * tk;
            }
            *yr = acc;
        }
    }
}

fn inner_epsilon(epsilon: f64, psi_norm: f64) -> f64 {
    let tight = (INNER_TOLERANCE * epsilon / psi_norm.max(1.0)).min(INNER_TOLERANCE_CEIL);
    tight.max(INNER_TOLERANCE_FLOOR.min(epsilon))
}

fn outer_target(epsilon: f64, residual: f64) -> f64 {
    (INNER_TRACKING * residual).max(epsilon)
}

/// Max over subsystems j and computational basis vectors x of
/// `|<a_1..x..a_N|chi>|` with `chi = (L - g)|a>`.
pub fn n_orthogonality_residual<A: LinearAction + ?Sized>(
    op: &A,
    state: &ProductState,
    g: f64,
) -> Result<f64, SolverError> {
    check_dims(op, state)?;
    let flat = flatten_factors(state.factors());
    let psi = op.apply_vec(&flat);
    Ok(residual_from_psi(state, &flat, &psi, g))
}

fn residual_from_psi(state: &ProductState, flat: &[C64], psi: &[C64], g: f64) -> f64 {
    let chi: Vec<C64> = psi.iter().zip(flat).map(|(p, a)| p - a * g).collect();
    (0..state.num_parties())
        .map(|j| linalg::max_abs(&contract_except(&chi, state.dims(), state.factors(), j)))
        .fold(0.0, f64::max)
}

/// Max over subsystems of `||(L_j - g) a_j||_inf`, `L_j` the reduced operator.
///
/// The max-norm makes this agree with [`n_orthogonality_residual`] exactly.
pub fn first_form_residual(
    op: &MultipartiteOperator,
    state: &ProductState,
    g: f64,
) -> Result<f64, SolverError> {
    check_dims(op, state)?;
    let mut worst = 0.0f64;
    for j in 0..state.num_parties() {
        let reduced = op.reduced_operator(state, j)?;
        let a = state.factor(j);
        let la = reduced.apply_vec(a);
        let r = la
            .iter()
            .zip(a)
            .map(|(x, y)| (x - y * g).norm())
            .fold(0.0, f64::max);
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Iterates SPI cycles from `start` until the N-orthogonality residual drops
/// below `epsilon` or the cycle budget is spent.
///
/// For a single party this is the power iteration. A vanishing backward
/// projection restarts the run from the next operator-basis state.
pub fn spi_solve<A: LinearAction + ?Sized>(
    op: &A,
    start: &ProductState,
    cfg: &SpiConfig,
) -> Result<SpiResult, SolverError> {
    cfg.validate()?;
    check_dims(op, start)?;
    if op.dims().len() == 1 {
        return solve_single(op, start, cfg);
    }

    let mut state = start.clone().canonical_phase();
    let mut flat = flatten_factors(state.factors());
    let mut psi = op.apply_vec(&flat);
    let mut g = real_quadratic_form(&flat, &psi)?;
    let mut g_trace = vec![g];
    let mut cycles = 0;
    let mut restarts = 0;
    loop {
        let residual = residual_from_psi(&state, &flat, &psi, g);
        let converged = residual < cfg.epsilon;
        if converged || cycles >= cfg.max_cycles {
            return Ok(SpiResult {
                g,
                state,
                residual,
                cycles,
                g_trace,
                start_index: 0,
                converged,
                restarts,
            });
        }
        cycles += 1;
        match cycle_from_psi(op, &state, &psi, cfg, outer_target(cfg.epsilon, residual)) {
            Ok(next) => {
                let next_flat = flatten_factors(next.factors());
                let middle = linalg::dot(&next_flat, &psi).norm();
                let next_psi = op.apply_vec(&next_flat);
                let next_g = real_quadratic_form(&next_flat, &next_psi)?;
                debug_assert!(
                    sandwiched(g, middle, next_g),
                    "sandwich violated: {g} <= {middle} <= {next_g}"
                );
                state = next;
                flat = next_flat;
                psi = next_psi;
                g = next_g;
                g_trace.push(g);
            }
            Err(SolverError::DegenerateProjection { .. }) => {
                state = operator_basis_state(op.dims(), restarts)?;
                restarts += 1;
                flat = flatten_factors(state.factors());
                psi = op.apply_vec(&flat);
                g = real_quadratic_form(&flat, &psi)?;
                g_trace = vec![g];
            }
            Err(e) => return Err(e),
        }
    }
}

fn solve_single<A: LinearAction + ?Sized>(
    op: &A,
    start: &ProductState,
    cfg: &SpiConfig,
) -> Result<SpiResult, SolverError> {
    let pi = power_iteration(op, start.factor(0), cfg)?;
    let state = ProductState::new(vec![pi.vector])?;
    let flat = state.factor(0);
    let psi = op.apply_vec(flat);
    let residual = residual_from_psi(&state, flat, &psi, pi.eigenvalue);
    Ok(SpiResult {
        g: pi.eigenvalue,
        state,
        residual,
        cycles: pi.iterations,
        g_trace: pi.trace,
        start_index: 0,
        converged: pi.converged,
        restarts: 0,
    })
}

fn sandwiched(old: f64, middle: f64, new: f64) -> bool {
    let slack = SANDWICH_TOL * old.abs().max(new.abs()).max(1.0);
    old <= middle + slack && middle <= new + slack
}

fn check_dims<A: LinearAction + ?Sized>(op: &A, state: &ProductState) -> Result<(), TensorError> {
    if op.dims() != state.dims() {
        return Err(TensorError::dims_mismatch(op.dims(), state.dims()));
    }
    Ok(())
}
