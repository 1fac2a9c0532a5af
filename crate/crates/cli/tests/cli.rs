mod common;

use std::fs;

use common::{flag, num, path_str, read_csv, read_json, spi, spi_stdin};
use tempfile::tempdir;

const TIGHT: f64 = 1e-9;
const BENCH_AGREEMENT: f64 = 1e-3;

fn export(dir: &std::path::Path, name: &str) -> std::path::PathBuf {
    spi(&["--out", path_str(dir), "states", "export", "--name", name]).ok().unwrap();
    dir.join(format!("{}.json", name.replace(':', "_")))
}

#[test]
fn swap_from_stdin_reaches_two() {
    let dir = tempdir().unwrap();
    let text = fs::read_to_string(export(dir.path(), "swap:3")).unwrap();
    let run = spi_stdin(&["solve", "-"], &text);
    run.ok().unwrap();
    let report: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    assert!((report["g_max"].as_f64().unwrap() - 2.0).abs() < TIGHT);
    assert_eq!(report["converged"], true);
}

#[test]
fn solve_writes_report_and_manifest() {
    let dir = tempdir().unwrap();
    let op = export(dir.path(), "smolin");
    let out = dir.path().join("run");
    spi(&["--out", path_str(&out), "solve", path_str(&op), "--partition", "1,2|3,4"]).ok().unwrap();
    let report = read_json(&out.join("solve.json")).unwrap();
    assert!((report["g_max"].as_f64().unwrap() - 0.25).abs() < TIGHT);
    assert_eq!(report["party_dims"], serde_json::json!([4, 4]));
    let manifest = read_json(&out.join("solve.manifest.json")).unwrap();
    assert_eq!(manifest["outputs"], serde_json::json!(["solve.json"]));
    assert!(manifest["timings"].as_array().is_some_and(|t| !t.is_empty()));
}

#[test]
fn non_convergence_exits_two_and_still_writes() {
    let dir = tempdir().unwrap();
    let op = export(dir.path(), "random:3x3x2:7");
    let out = dir.path().join("run");
    let run = spi(&["--out", path_str(&out), "--max-cycles", "1", "solve", path_str(&op)]);
    assert_eq!(run.code, 2, "{}", run.stderr);
    let report = read_json(&out.join("solve.json")).unwrap();
    assert_eq!(report["converged"], false);
}

#[test]
fn input_errors_exit_one() {
    let dir = tempdir().unwrap();
    let op = export(dir.path(), "swap:2");
    let mismatch = spi(&["solve", path_str(&op), "--partition", "1|2|3"]);
    assert_eq!(mismatch.code, 1);
    assert!(mismatch.stderr.contains("partition"), "{}", mismatch.stderr);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\n  \"dims\": [2, 2],\n  \"matrix\": [oops]\n}\n").unwrap();
    let malformed = spi(&["solve", path_str(&bad)]);
    assert_eq!(malformed.code, 1);
    assert!(malformed.stderr.contains("line 3"), "{}", malformed.stderr);

    assert_eq!(spi(&["solve", "/nonexistent/op.json"]).code, 1);
    assert_eq!(spi(&["--tol", "-1", "solve", path_str(&op)]).code, 1);
    assert_eq!(spi(&["--threads", "0", "solve", path_str(&op)]).code, 1);
    assert_eq!(spi(&["no-such-command"]).code, 1);
    assert_eq!(spi(&["--help"]).code, 0);
}

#[test]
fn witness_separates_smolin_partitions() {
    let dir = tempdir().unwrap();
    let s = export(dir.path(), "smolin");
    let verdict = |partition: &str| {
        let run = spi(&[
            "witness", "test", "--operator", path_str(&s), "--state", path_str(&s),
            "--partition", partition,
        ]);
        run.ok().unwrap();
        let report: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
        report["entangled"].as_bool().unwrap()
    };
    assert!(verdict("1|2,3,4"));
    assert!(verdict("1|2|3|4"));
    assert!(!verdict("1,2|3,4"));
}

#[test]
fn bench_dims_agrees_with_oracle() {
    let dir = tempdir().unwrap();
    let out = path_str(dir.path());
    spi(&["--out", out, "--start", "basis", "bench", "dims", "--sizes", "2,3", "--samples", "2"])
        .ok()
        .unwrap();
    let header = fs::read_to_string(dir.path().join("bench_dims.csv")).unwrap();
    assert!(header.starts_with("mode,size,sample,seed,method,g,converged,runtime_s\r\n"));
    let rows = read_csv(&dir.path().join("bench_dims.csv")).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 2);
    assert!(rows.iter().all(|r| flag(r, "converged")));
    let summary = read_csv(&dir.path().join("bench_dims_summary.csv")).unwrap();
    assert_eq!(summary.len(), 2);
    for row in &summary {
        assert!(num(row, "max_abs_dg") <= BENCH_AGREEMENT, "{row:?}");
    }
}

#[test]
fn reproduce_swap_recurrence_writes_all_cycles() {
    let dir = tempdir().unwrap();
    spi(&["--out", path_str(dir.path()), "reproduce", "swap-recurrence", "--cycles", "4"]).ok().unwrap();
    let rows = read_csv(&dir.path().join("swap_recurrence.csv")).unwrap();
    assert_eq!(rows.len(), 5);
    for row in &rows {
        assert!(num(row, "gamma2") <= num(row, "bound") + TIGHT);
    }
}
