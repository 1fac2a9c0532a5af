use std::io::Read;
use std::path::Path;

use serde::Serialize;
use serde_json::json;
use spi_core::io::{operator_to_json, parse_operator, read_operator};
use spi_core::states::NamedState;
use spi_core::witness::{build_witness, test_state, DensityOperator, Verdict};
use spi_core::{
    max_separability_eigenvalue, MultipartiteOperator, Partition, ProductState, SolverError,
    SpiResult,
};

use crate::args::{GlobalArgs, StartArg};
use crate::output::{RunManifest, Sink};
use crate::CliError;

/// Reads an operator file; `-` is stdin.
pub(crate) fn load_operator(path: &Path) -> Result<MultipartiteOperator, CliError> {
    let read_err = |source| CliError::Read {
        path: path.display().to_string(),
        source,
    };
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Input(format!("<stdin>: {e}")))?;
        return parse_operator(&text).map_err(|source| CliError::Read {
            path: "<stdin>".into(),
            source,
        });
    }
    read_operator(path).map_err(read_err)
}

fn partition_for(op: &MultipartiteOperator, p: Option<&Partition>) -> Result<Partition, CliError> {
    let n = op.dims().len();
    let p = p.cloned().unwrap_or_else(|| Partition::finest(n));
    if p.num_subsystems() != n {
        return Err(CliError::Input(format!(
            "partition {p} covers {} subsystems but the operator has dims {}",
            p.num_subsystems(),
            op.dims()
        )));
    }
    Ok(p)
}

#[derive(Debug, Serialize)]
struct StartRow {
    start: usize,
    g: f64,
    residual: f64,
    cycles: usize,
    converged: bool,
    restarts: usize,
}

impl From<&SpiResult> for StartRow {
    fn from(r: &SpiResult) -> Self {
        StartRow {
            start: r.start_index,
            g: r.g,
            residual: r.residual,
            cycles: r.cycles,
            converged: r.converged,
            restarts: r.restarts,
        }
    }
}

#[derive(Debug, Serialize)]
struct SolveReport {
    dims: Vec<usize>,
    partition: String,
    /// Dimensions of the grouped parties, the layout of `argmax`.
    party_dims: Vec<usize>,
    strategy: String,
    converged: bool,
    g_max: f64,
    residual: f64,
    cycles: usize,
    /// Identity offset used internally; absent when no start converged.
    shift: Option<f64>,
    argmax: ProductState,
    per_start: Vec<StartRow>,
}

pub(crate) fn solve(
    g: &GlobalArgs,
    file: &Path,
    partition: Option<&Partition>,
) -> Result<(), CliError> {
    let op = load_operator(file)?;
    let partition = partition_for(&op, partition)?;
    let cfg = g.config(StartArg::Basis);
    let manifest = RunManifest::new(
        json!({ "command": "solve", "partition": partition.to_string(), "spi": cfg }),
        vec![cfg.seed],
    );
    let mut sink = Sink::new(g.out.as_deref(), "solve", manifest)?;
    let coarse = op.coarse_grain(&partition)?;
    let result = sink
        .manifest()
        .time("solve", || max_separability_eigenvalue(&coarse.operator, &cfg));

    let base = |best: &SpiResult| SolveReport {
        dims: op.dims().as_slice().to_vec(),
        partition: partition.to_string(),
        party_dims: coarse.operator.dims().as_slice().to_vec(),
        strategy: cfg.start_strategy.label().to_string(),
        converged: best.converged,
        g_max: best.g,
        residual: best.residual,
        cycles: best.cycles,
        shift: None,
        argmax: best.state.clone(),
        per_start: Vec::new(),
    };
    let report = match result {
        Ok(bound) => SolveReport {
            shift: Some(bound.shift),
            per_start: bound.per_start.iter().map(StartRow::from).collect(),
            ..base(bound.argmax_result())
        },
        Err(SolverError::NoConvergence { best }) => SolveReport {
            per_start: vec![StartRow::from(best.as_ref())],
            ..base(&best)
        },
        Err(e) => return Err(e.into()),
    };
    sink.json("solve.json", &report)?;
    sink.finish()?;
    if report.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged(format!(
            "no start converged within {} cycles; best g = {}",
            cfg.max_cycles, report.g_max
        )))
    }
}

#[derive(Debug, Serialize)]
struct WitnessReport {
    partition: String,
    g_max: f64,
    /// `tr(rho L)`.
    trace: f64,
    /// `g_max - tr(rho L)`; negative certifies entanglement.
    value: f64,
    verdict: Verdict,
    entangled: bool,
    argmax: ProductState,
}

pub(crate) fn witness_test(
    g: &GlobalArgs,
    operator: &Path,
    state: &Path,
    partition: Option<&Partition>,
) -> Result<(), CliError> {
    let l = load_operator(operator)?;
    let rho = load_operator(state)?;
    if rho.dims() != l.dims() {
        return Err(CliError::Input(format!(
            "state dims {} do not match operator dims {}",
            rho.dims(),
            l.dims()
        )));
    }
    let rho = DensityOperator::new(rho)
        .map_err(|e| CliError::Input(format!("{}: {e}", state.display())))?;
    let partition = partition_for(&l, partition)?;
    let cfg = g.config(StartArg::Basis);
    let manifest = RunManifest::new(
        json!({ "command": "witness test", "partition": partition.to_string(), "spi": cfg }),
        vec![cfg.seed],
    );
    let mut sink = Sink::new(g.out.as_deref(), "witness", manifest)?;
    let w = sink
        .manifest()
        .time("solve", || build_witness(&l, &partition, &cfg))?;
    let d = test_state(&w, &rho)?;
    sink.json(
        "witness.json",
        &WitnessReport {
            partition: partition.to_string(),
            g_max: w.g_max,
            trace: d.trace,
            value: d.value,
            verdict: d.verdict,
            entangled: d.entangled(),
            argmax: w.bound.argmax.clone(),
        },
    )?;
    sink.finish()
}

pub(crate) fn export(g: &GlobalArgs, name: &NamedState) -> Result<(), CliError> {
    let manifest = RunManifest::new(
        json!({ "command": "states export", "name": name.to_string() }),
        Vec::new(),
    );
    let mut sink = Sink::new(g.out.as_deref(), "states", manifest)?;
    let op = sink.manifest().time("generate", || name.operator())?;
    let file = format!("{}.json", name.to_string().replace(':', "_"));
    let mut text = operator_to_json(&op);
    if !text.ends_with('\n') {
        text.push('\n');
    }
    sink.text(&file, &text)?;
    sink.finish()
}
