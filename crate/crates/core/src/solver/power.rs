use serde::{Deserialize, Serialize};

use super::{SolverError, SpiConfig};
use crate::linalg;
use crate::tensor::{LinearAction, TensorError};
use crate::C64;

/// Outcome of a power iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerIteration {
    /// Rayleigh quotient of `vector`.
    pub eigenvalue: f64,
    pub vector: Vec<C64>,
    pub iterations: usize,
    pub converged: bool,
    /// Rayleigh quotient after every iteration, starting with the start vector's.
    pub trace: Vec<f64>,
    /// `||L z - <z|L|z> z||` at the last check.
    pub residual: f64,
}

/// Iterates `z <- L z / ||L z||` until `||L z - <z|L|z> z|| < pi_epsilon`.
///
/// The operator is treated as acting on a single party. On convergence one
/// more step is taken and the returned vector is that iterate, so its error
/// is at most the threshold divided by the spectral gap. Non-convergence is
/// reported through `converged`, not as an error.
pub fn power_iteration<A: LinearAction + ?Sized>(
    op: &A,
    start: &[C64],
    cfg: &SpiConfig,
) -> Result<PowerIteration, SolverError> {
    let dim = op.dims().total();
    if start.len() != dim {
        return Err(TensorError::LengthMismatch {
            expected: dim,
            actual: start.len(),
        }
        .into());
    }
    let mut z = start.to_vec();
    if linalg::normalize(&mut z) == 0.0 {
        return Err(TensorError::ZeroVector("power iteration start".into()).into());
    }
    let mut y = vec![C64::new(0.0, 0.0); dim];
    op.apply_into(&z, &mut y);
    let mut rq = linalg::dot(&z, &y).re;
    let mut trace = vec![rq];
    let mut iterations = 0;
    let mut converged = false;
    let mut residual = f64::INFINITY;
    while iterations < cfg.pi_max_iters {
        residual = residual_norm(&y, &z, rq);
        let done = residual < cfg.pi_epsilon;
        let ny = linalg::norm(&y);
        if ny == 0.0 {
            break;
        }
        z.iter_mut().zip(&y).for_each(|(zi, yi)| *zi = yi / ny);
        op.apply_into(&z, &mut y);
        rq = linalg::dot(&z, &y).re;
        trace.push(rq);
        iterations += 1;
        if done {
            converged = true;
            break;
        }
    }
    linalg::canonicalize_phase(&mut z);
    Ok(PowerIteration {
        eigenvalue: rq,
        vector: z,
        iterations,
        converged,
        trace,
        residual,
    })
}

fn residual_norm(y: &[C64], z: &[C64], rq: f64) -> f64 {
    y.iter()
        .zip(z)
        .map(|(yi, zi)| (yi - zi * rq).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
