use serde::Serialize;
use serde_json::json;
use spi_core::linalg;
use spi_core::solver::spi_cycle;
use spi_core::states::{smolin_state, swap_operator};
use spi_core::tensor::enumerate_partitions;
use spi_core::witness::{horodecki_grid, partition_scan, ScanRow, Verdict};
use spi_core::{Partition, ProductState, C64};

use crate::args::{GlobalArgs, Reproduce, StartArg};
use crate::output::{RunManifest, Sink};
use crate::CliError;

/// Rows of the four-qubit table, in display order.
pub const SMOLIN_TABLE: [&str; 4] = ["1,2|3,4", "1|2,3,4", "1|2|3,4", "1|2|3|4"];

pub(crate) fn run(g: &GlobalArgs, target: &Reproduce) -> Result<(), CliError> {
    match target {
        Reproduce::Horodecki { step } => horodecki(g, *step),
        Reproduce::Smolin => smolin(g),
        Reproduce::SwapRecurrence { gamma2, cycles, dim } => swap_recurrence(g, *gamma2, *cycles, *dim),
    }
}

/// `0, 5/n, ..., 5` with `n = 5 / step`; exact at the integers.
fn grid(step: f64) -> Result<Vec<f64>, CliError> {
    let n = (5.0 / step).round();
    if !(step > 0.0) || n < 1.0 || (n * step - 5.0).abs() > 1e-9 {
        return Err(CliError::Input(format!("--step {step} must divide 5")));
    }
    let n = n as usize;
    Ok((0..=n).map(|k| 5.0 * k as f64 / n as f64).collect())
}

fn horodecki(g: &GlobalArgs, step: f64) -> Result<(), CliError> {
    let values = grid(step)?;
    let cfg = g.config(StartArg::Basis);
    let manifest = RunManifest::new(
        json!({ "command": "reproduce horodecki", "step": step, "spi": cfg }),
        vec![cfg.seed],
    );
    let mut sink = Sink::files(g.out.as_deref(), "horodecki", manifest)?;
    let result = sink
        .manifest()
        .time("grid", || horodecki_grid(&values, &values, &cfg))?;
    sink.csv("horodecki_grid.csv", &result.cells)?;
    sink.csv("horodecki_summary.csv", &result.per_alpha)?;
    sink.finish()
}

#[derive(Debug, Serialize)]
struct ScanCsv {
    partition: String,
    parties: usize,
    g_max: f64,
    trace: f64,
    entangled: bool,
}

impl From<&ScanRow> for ScanCsv {
    fn from(r: &ScanRow) -> Self {
        ScanCsv {
            partition: r.partition.braces(),
            parties: r.partition.num_parties(),
            g_max: r.g_max,
            trace: r.trace,
            entangled: r.verdict == Verdict::Entangled,
        }
    }
}

#[derive(Debug, Serialize)]
struct KBoundCsv {
    parties: usize,
    g_max: f64,
    trace: f64,
    entangled: bool,
}

fn smolin(g: &GlobalArgs) -> Result<(), CliError> {
    let cfg = g.config(StartArg::Basis);
    let manifest = RunManifest::new(
        json!({ "command": "reproduce smolin", "spi": cfg }),
        vec![cfg.seed],
    );
    let mut sink = Sink::files(g.out.as_deref(), "smolin", manifest)?;
    let s = smolin_state();
    let partitions: Vec<Partition> = enumerate_partitions(4)?
        .into_iter()
        .filter(|p| p.num_parties() > 1)
        .collect();
    let scan = sink
        .manifest()
        .time("scan", || partition_scan(s.operator(), &s, &partitions, &cfg))?;

    let table = SMOLIN_TABLE
        .iter()
        .map(|label| {
            let p: Partition = label.parse().expect("table labels are valid");
            let row = scan.rows.iter().find(|r| r.partition == p).expect("scan covers table");
            ScanCsv::from(row)
        })
        .collect::<Vec<_>>();
    let k_bounds: Vec<KBoundCsv> = scan
        .k_bounds
        .iter()
        .map(|k| KBoundCsv {
            parties: k.parties,
            g_max: k.g_max,
            trace: k.trace,
            entangled: k.verdict == Verdict::Entangled,
        })
        .collect();
    sink.csv("smolin_table.csv", &table)?;
    sink.csv(
        "partition_scan.csv",
        &scan.rows.iter().map(ScanCsv::from).collect::<Vec<_>>(),
    )?;
    sink.csv("smolin_k_bounds.csv", &k_bounds)?;
    sink.finish()
}

#[derive(Debug, Serialize)]
struct RecurrenceRow {
    s: usize,
    gamma2: f64,
    /// `gamma2_0 / (9 - 8 gamma2_0)^s`.
    bound: f64,
    g: f64,
}

fn swap_recurrence(g: &GlobalArgs, gamma2: f64, cycles: usize, dim: usize) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&gamma2) {
        return Err(CliError::Input(format!("--gamma2 {gamma2} must lie in [0, 1]")));
    }
    let op = swap_operator(dim)?;
    let cfg = g.config(StartArg::Basis);
    let manifest = RunManifest::new(
        json!({ "command": "reproduce swap-recurrence", "gamma2": gamma2, "cycles": cycles, "dim": dim, "spi": cfg }),
        vec![cfg.seed],
    );
    let mut sink = Sink::files(g.out.as_deref(), "swap_recurrence", manifest)?;

    let zero = C64::new(0.0, 0.0);
    let mut a1 = vec![zero; dim];
    a1[0] = C64::new(1.0, 0.0);
    let mut a2 = vec![zero; dim];
    a2[0] = C64::new(gamma2.sqrt(), 0.0);
    a2[1] = C64::new((1.0 - gamma2).sqrt(), 0.0);
    let mut state = ProductState::normalized(vec![a1, a2])?;

    let ratio = 9.0 - 8.0 * gamma2;
    let mut rows = Vec::with_capacity(cycles + 1);
    sink.manifest().time("cycles", || -> Result<(), CliError> {
        for s in 0..=cycles {
            if s > 0 {
                state = spi_cycle(&op, &state, &cfg)?;
            }
            rows.push(RecurrenceRow {
                s,
                gamma2: linalg::dot(state.factor(0), state.factor(1)).norm_sqr(),
                bound: gamma2 / ratio.powi(s as i32),
                g: op.expectation(&state)?,
            });
        }
        Ok(())
    })?;
    sink.csv("swap_recurrence.csv", &rows)?;
    sink.finish()
}
