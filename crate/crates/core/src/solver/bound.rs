use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::starts::{operator_basis, projection_start};
use super::{spi_solve, SolverError, SpiConfig, SpiResult, StartStrategy};
use crate::tensor::{MultipartiteOperator, ProductState};

/// Minimum eigenvalue guaranteed by [`ensure_positive`].
pub const POSITIVITY_MARGIN: f64 = 1e-6;

/// Outcome of the multi-start maximization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessBound {
    pub g_max: f64,
    pub argmax: ProductState,
    /// Every per-start result, in start order, with the shift removed.
    pub per_start: Vec<SpiResult>,
    /// Identity shift applied internally before solving.
    pub shift: f64,
    pub strategy: String,
}

impl WitnessBound {
    pub fn argmax_result(&self) -> &SpiResult {
        self.per_start
            .iter()
            .find(|r| r.converged && r.g == self.g_max)
            .expect("argmax is among the converged starts")
    }

    pub fn converged_starts(&self) -> usize {
        self.per_start.iter().filter(|r| r.converged).count()
    }
}

/// `op + shift * 1` with `shift = max(0, delta - lambda_min)`.
pub fn ensure_positive(op: &MultipartiteOperator) -> (MultipartiteOperator, f64) {
    let lambda_min = op.eigenvalues().first().copied().unwrap_or(0.0);
    let shift = shift_for(lambda_min);
    (op.shifted(shift), shift)
}

fn shift_for(lambda_min: f64) -> f64 {
    tight_shift(lambda_min).max(0.0)
}

/// Moves the smallest eigenvalue to exactly the margin; may be negative.
/// Separability eigenvectors are unaffected, while a large identity offset
/// would slow the iteration the way it slows the power method.
fn tight_shift(lambda_min: f64) -> f64 {
    POSITIVITY_MARGIN - lambda_min
}

/// Maximal separability eigenvalue of `op` by SPI from every configured
/// starting vector.
///
/// The operator is translated so that its smallest eigenvalue is
/// [`POSITIVITY_MARGIN`]; reported values have the translation removed.
/// Starts are solved concurrently and reduced in start order; the first
/// start reaching the largest converged `g` wins.
pub fn max_separability_eigenvalue(
    op: &MultipartiteOperator,
    cfg: &SpiConfig,
) -> Result<WitnessBound, SolverError> {
    cfg.validate()?;
    let (shift, starts) = match &cfg.start_strategy {
        StartStrategy::EigenvectorProjection => {
            let eigen = op.eigen();
            let start = projection_start(op.dims(), eigen.max().1, cfg)?;
            (tight_shift(eigen.min()), vec![start])
        }
        other => {
            let lambda_min = op.eigenvalues().first().copied().unwrap_or(0.0);
            let starts = match other {
                StartStrategy::Explicit(_) => super::starting_vectors(op, other, cfg)?,
                _ => operator_basis(op.dims())?,
            };
            (tight_shift(lambda_min), starts)
        }
    };
    let shifted = op.shifted(shift);
    if starts.is_empty() {
        return Err(SolverError::NoStartingVectors);
    }

    let per_start = starts
        .par_iter()
        .enumerate()
        .map(|(k, s)| {
            let mut r = spi_solve(&shifted, s, cfg)?;
            r.start_index = k;
            r.g -= shift;
            r.g_trace.iter_mut().for_each(|g| *g -= shift);
            Ok(r)
        })
        .collect::<Result<Vec<_>, SolverError>>()?;

    let best = per_start
        .iter()
        .filter(|r| r.converged)
        .fold(None::<&SpiResult>, |best, r| match best {
            Some(b) if b.g >= r.g => Some(b),
            _ => Some(r),
        });
    let Some(best) = best else {
        let best = per_start
            .iter()
            .fold(&per_start[0], |b, r| if r.g > b.g { r } else { b });
        return Err(SolverError::NoConvergence {
            best: Box::new(best.clone()),
        });
    };
    Ok(WitnessBound {
        g_max: best.g,
        argmax: best.state.clone(),
        shift,
        strategy: cfg.start_strategy.label().to_string(),
        per_start,
    })
}
