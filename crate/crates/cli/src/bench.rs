use std::time::Instant;

use serde::Serialize;
use serde_json::json;
use spi_core::oracle::{oracle_gmax, OracleConfig};
use spi_core::states::{random_operator, RandomOperatorSpec};
use spi_core::{max_separability_eigenvalue, SolverError, SubsystemDims};

use crate::args::{Bench, BenchArgs, GlobalArgs, StartArg};
use crate::output::{RunManifest, Sink};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub mode: String,
    pub size: usize,
    pub sample: usize,
    pub seed: u64,
    pub method: String,
    pub g: f64,
    pub converged: bool,
    /// Solver wall time only.
    pub runtime_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchSummary {
    pub size: usize,
    pub samples: usize,
    pub spi_mean_s: f64,
    pub oracle_mean_s: f64,
    pub max_abs_dg: f64,
}

fn dims_for(mode: &str, size: usize) -> Result<SubsystemDims, CliError> {
    let d = match mode {
        "dims" => vec![size, size],
        _ => vec![2; size],
    };
    Ok(SubsystemDims::new(d)?)
}

pub(crate) fn run(g: &GlobalArgs, mode: &Bench) -> Result<(), CliError> {
    let (mode, args, default_sizes): (&str, &BenchArgs, Vec<usize>) = match mode {
        Bench::Dims(a) => ("dims", a, (2..=8).collect()),
        Bench::Parties(a) => ("parties", a, (2..=10).collect()),
    };
    let sizes = args.sizes.clone().unwrap_or(default_sizes);
    if sizes.is_empty() || args.samples == 0 {
        return Err(CliError::Input("need at least one size and one sample".into()));
    }
    let cfg = g.config(StartArg::Eigproj);
    let oracle_cfg = OracleConfig {
        population: args.population,
        generations: args.generations,
        mutation_scale: args.mutation_scale,
        restarts: args.restarts,
        seed: 0,
        refine_iters: args.refine_iters,
    };
    oracle_cfg.validate()?;
    let seeds: Vec<u64> = (0..args.samples as u64).map(|k| g.seed.wrapping_add(k)).collect();
    let manifest = RunManifest::new(
        json!({
            "command": format!("bench {mode}"),
            "sizes": sizes,
            "samples": args.samples,
            "spi": cfg,
            "oracle": oracle_cfg,
            "operators": "random_operator(dims, seed) per instance; oracle seeded with the same seed",
        }),
        seeds.clone(),
    );
    let stem = format!("bench_{mode}");
    let mut sink = Sink::files(g.out.as_deref(), &stem, manifest)?;

    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let (mut t_gen, mut t_spi, mut t_oracle) = (0.0, 0.0, 0.0);
    for &size in &sizes {
        let dims = dims_for(mode, size)?;
        let (mut spi_total, mut oracle_total, mut max_dg) = (0.0, 0.0, 0.0f64);
        for (sample, &seed) in seeds.iter().enumerate() {
            let clock = Instant::now();
            let op = random_operator(&RandomOperatorSpec::new(dims.clone(), seed));
            t_gen += clock.elapsed().as_secs_f64();

            let clock = Instant::now();
            let spi = match max_separability_eigenvalue(&op, &cfg) {
                Ok(b) => (b.g_max, true),
                Err(SolverError::NoConvergence { best }) => (best.g, false),
                Err(e) => return Err(e.into()),
            };
            let spi_time = clock.elapsed().as_secs_f64();

            let clock = Instant::now();
            let oracle = oracle_gmax(&op, &OracleConfig { seed, ..oracle_cfg.clone() })?;
            let oracle_time = clock.elapsed().as_secs_f64();

            spi_total += spi_time;
            oracle_total += oracle_time;
            max_dg = max_dg.max((spi.0 - oracle.g).abs());
            let row = |method: &str, g: f64, converged: bool, runtime_s: f64| BenchRow {
                mode: mode.to_string(),
                size,
                sample,
                seed,
                method: method.to_string(),
                g,
                converged,
                runtime_s,
            };
            rows.push(row("spi", spi.0, spi.1, spi_time));
            rows.push(row("oracle", oracle.g, true, oracle_time));
        }
        t_spi += spi_total;
        t_oracle += oracle_total;
        let n = args.samples as f64;
        summary.push(BenchSummary {
            size,
            samples: args.samples,
            spi_mean_s: spi_total / n,
            oracle_mean_s: oracle_total / n,
            max_abs_dg: max_dg,
        });
    }
    for (stage, seconds) in [("generate", t_gen), ("spi", t_spi), ("oracle", t_oracle)] {
        sink.manifest().timings.push(crate::StageTiming {
            stage: stage.to_string(),
            seconds,
        });
    }
    sink.csv(&format!("{stem}.csv"), &rows)?;
    sink.csv(&format!("{stem}_summary.csv"), &summary)?;
    sink.finish()
}
