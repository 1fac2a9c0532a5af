//! Entanglement witnesses `W = g_max * 1 - L`: construction from solved
//! bounds, detection on density operators, partition scans and the
//! Horodecki-family grid.

mod density;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::solver::{ensure_positive, max_separability_eigenvalue, SolverError, SpiConfig, WitnessBound};
use crate::states::{horodecki_state, StatesError};
use crate::tensor::{CoarseGrained, MultipartiteOperator, Partition, ProductState, TensorError};

pub use density::{DensityOperator, PSD_TOL, TRACE_TOL};

/// Violations smaller than this are reported as inconclusive.
pub const DETECTION_MARGIN: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    States(#[from] StatesError),
    #[error("not a density operator: {0}")]
    NotDensity(String),
    #[error("observable list is empty")]
    NoObservables,
    #[error("{observables} observables but {coefficients} coefficients")]
    CoefficientCount { observables: usize, coefficients: usize },
}

/// An operator together with its maximal separability eigenvalue for one partition.
#[derive(Debug, Clone)]
pub struct Witness {
    /// `L` in the original subsystem order.
    pub operator: MultipartiteOperator,
    pub partition: Partition,
    /// `L` regrouped so that each group of `partition` is one party.
    pub coarse: CoarseGrained,
    pub g_max: f64,
    /// Solver output; states live on the regrouped parties.
    pub bound: WitnessBound,
    pub config: SpiConfig,
}

impl Witness {
    /// `<a|W|a>` for a product state over the regrouped parties.
    pub fn value_at(&self, state: &ProductState) -> Result<f64, WitnessError> {
        Ok(self.g_max - self.coarse.operator.expectation(state)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Entangled,
    /// Violation within the detection margin.
    Inconclusive,
    NotDetected,
}

impl Verdict {
    fn from_value(value: f64) -> Self {
        if value < -DETECTION_MARGIN {
            Verdict::Entangled
        } else if value < 0.0 {
            Verdict::Inconclusive
        } else {
            Verdict::NotDetected
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    /// `tr(L rho)`.
    pub trace: f64,
    /// `g_max - tr(L rho)`.
    pub value: f64,
    pub verdict: Verdict,
}

impl Detection {
    pub fn entangled(&self) -> bool {
        self.verdict == Verdict::Entangled
    }
}

/// Regroups `l` by `partition` and maximizes over product states of the groups.
pub fn build_witness(
    l: &MultipartiteOperator,
    partition: &Partition,
    cfg: &SpiConfig,
) -> Result<Witness, WitnessError> {
    let coarse = l.coarse_grain(partition)?;
    let bound = max_separability_eigenvalue(&coarse.operator, cfg)?;
    Ok(Witness {
        operator: l.clone(),
        partition: partition.clone(),
        coarse,
        g_max: bound.g_max,
        bound,
        config: cfg.clone(),
    })
}

pub fn test_state(w: &Witness, rho: &DensityOperator) -> Result<Detection, WitnessError> {
    if rho.dims() != w.operator.dims() {
        return Err(TensorError::dims_mismatch(w.operator.dims(), rho.dims()).into());
    }
    let trace = w.operator.trace_product(rho.operator())?;
    let value = w.g_max - trace;
    Ok(Detection {
        trace,
        value,
        verdict: Verdict::from_value(value),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub partition: Partition,
    pub g_max: f64,
    pub trace: f64,
    pub value: f64,
    pub verdict: Verdict,
}

/// Largest `g_max` over the scanned partitions with a given number of parties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KBound {
    pub parties: usize,
    pub g_max: f64,
    pub trace: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionScan {
    pub rows: Vec<ScanRow>,
    pub k_bounds: Vec<KBound>,
}

/// One witness and one test per partition, plus the per-length maxima.
pub fn partition_scan(
    l: &MultipartiteOperator,
    rho: &DensityOperator,
    partitions: &[Partition],
    cfg: &SpiConfig,
) -> Result<PartitionScan, WitnessError> {
    if rho.dims() != l.dims() {
        return Err(TensorError::dims_mismatch(l.dims(), rho.dims()).into());
    }
    let rows = partitions
        .par_iter()
        .map(|p| {
            let w = build_witness(l, p, cfg)?;
            let d = test_state(&w, rho)?;
            Ok(ScanRow {
                partition: p.clone(),
                g_max: w.g_max,
                trace: d.trace,
                value: d.value,
                verdict: d.verdict,
            })
        })
        .collect::<Result<Vec<_>, WitnessError>>()?;

    let mut lengths: Vec<usize> = rows.iter().map(|r| r.partition.num_parties()).collect();
    lengths.sort_unstable();
    lengths.dedup();
    let k_bounds = lengths
        .into_iter()
        .map(|k| {
            let best = rows
                .iter()
                .filter(|r| r.partition.num_parties() == k)
                .fold(None::<&ScanRow>, |b, r| match b {
                    Some(b) if b.g_max >= r.g_max => Some(b),
                    _ => Some(r),
                })
                .expect("length taken from rows");
            KBound {
                parties: k,
                g_max: best.g_max,
                trace: best.trace,
                verdict: Verdict::from_value(best.g_max - best.trace),
            }
        })
        .collect();
    Ok(PartitionScan { rows, k_bounds })
}

/// `nu * 1 + sum_k mu_k M_k` with the smallest `nu >= 0` that makes it
/// positive definite. Returns the operator and `nu`.
pub fn from_observables(
    observables: &[MultipartiteOperator],
    coefficients: &[f64],
) -> Result<(MultipartiteOperator, f64), WitnessError> {
    let Some(first) = observables.first() else {
        return Err(WitnessError::NoObservables);
    };
    if observables.len() != coefficients.len() {
        return Err(WitnessError::CoefficientCount {
            observables: observables.len(),
            coefficients: coefficients.len(),
        });
    }
    let mut sum = MultipartiteOperator::zeros(first.dims().clone());
    for (m, mu) in observables.iter().zip(coefficients) {
        sum = sum.add_scaled(m, *mu)?;
    }
    Ok(ensure_positive(&sum))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub alpha: f64,
    pub beta: f64,
    pub g_beta: f64,
    /// `tr(rho_alpha L_beta)`.
    pub trace: f64,
    pub detected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaSummary {
    pub alpha: f64,
    pub detected: bool,
    /// Most negative `g_beta - tr(rho_alpha L_beta)` over the grid.
    pub min_value: f64,
    pub best_beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorodeckiGrid {
    /// Row-major over (alpha, beta).
    pub cells: Vec<GridCell>,
    pub per_alpha: Vec<AlphaSummary>,
}

/// Tests every `rho_alpha` against every `L_beta = rho_beta` over the 3 x 3
/// split.
pub fn horodecki_grid(
    alphas: &[f64],
    betas: &[f64],
    cfg: &SpiConfig,
) -> Result<HorodeckiGrid, WitnessError> {
    let split = Partition::finest(2);
    let witnesses = betas
        .par_iter()
        .map(|&b| build_witness(&horodecki_state(b)?.into_operator(), &split, cfg))
        .collect::<Result<Vec<_>, WitnessError>>()?;
    let states = alphas
        .iter()
        .map(|&a| horodecki_state(a))
        .collect::<Result<Vec<_>, _>>()?;

    let mut cells = Vec::with_capacity(alphas.len() * betas.len());
    let mut per_alpha = Vec::with_capacity(alphas.len());
    for (&alpha, rho) in alphas.iter().zip(&states) {
        let mut summary = AlphaSummary {
            alpha,
            detected: false,
            min_value: f64::INFINITY,
            best_beta: f64::NAN,
        };
        for (&beta, w) in betas.iter().zip(&witnesses) {
            let d = test_state(w, rho)?;
            cells.push(GridCell {
                alpha,
                beta,
                g_beta: w.g_max,
                trace: d.trace,
                detected: d.entangled(),
            });
            summary.detected |= d.entangled();
            if d.value < summary.min_value {
                summary.min_value = d.value;
                summary.best_beta = beta;
            }
        }
        per_alpha.push(summary);
    }
    Ok(HorodeckiGrid { cells, per_alpha })
}
