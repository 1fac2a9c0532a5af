#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::io::Write;
use std::process::{Command, Stdio};
use std::time::Instant;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub seconds: f64,
}

impl Run {
    pub fn ok(&self) -> Result<(), String> {
        if self.code == 0 {
            Ok(())
        } else {
            Err(format!("exit {}: {}", self.code, self.stderr.trim()))
        }
    }
}

pub fn spi(args: &[&str]) -> Run {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_spi"))
        .args(args)
        .output()
        .expect("spi binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Like [`spi`] with `input` piped to stdin.
pub fn spi_stdin(args: &[&str], input: &str) -> Run {
    let start = Instant::now();
    let mut child = Command::new(env!("CARGO_BIN_EXE_spi"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spi binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("temp paths are UTF-8")
}

pub fn read_json(path: &Path) -> Result<serde_json::Value, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Rows keyed by header name.
pub fn read_csv(path: &Path) -> Result<Vec<BTreeMap<String, String>>, String> {
    let mut r = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let headers = r.headers().map_err(|e| e.to_string())?.clone();
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| e.to_string())?;
            Ok(headers.iter().map(String::from).zip(rec.iter().map(String::from)).collect())
        })
        .collect()
}

pub fn num(row: &BTreeMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap_or_else(|_| panic!("{key} = {:?} is not a number", row[key]))
}

pub fn flag(row: &BTreeMap<String, String>, key: &str) -> bool {
    row[key] == "true"
}

/// Manifest with the fields that legitimately differ between runs removed.
fn stable_manifest(path: &Path) -> Result<serde_json::Value, String> {
    let mut v = read_json(path)?;
    let obj = v.as_object_mut().ok_or("manifest is not an object")?;
    for k in ["timings", "command_line", "threads"] {
        obj.remove(k);
    }
    Ok(v)
}

/// Byte equality of every result file in two output directories, and
/// equality of their manifests up to timings and paths.
pub fn same_outputs(a: &Path, b: &Path) -> Result<usize, String> {
    let list = |d: &Path| -> Result<Vec<String>, String> {
        let mut names: Vec<String> = fs::read_dir(d)
            .map_err(|e| e.to_string())?
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        Ok(names)
    };
    let (na, nb) = (list(a)?, list(b)?);
    if na != nb {
        return Err(format!("file sets differ: {na:?} vs {nb:?}"));
    }
    for name in &na {
        let (pa, pb) = (a.join(name), b.join(name));
        if name.ends_with(".manifest.json") {
            if stable_manifest(&pa)? != stable_manifest(&pb)? {
                return Err(format!("manifest {name} differs"));
            }
        } else if fs::read(&pa).map_err(|e| e.to_string())? != fs::read(&pb).map_err(|e| e.to_string())? {
            return Err(format!("{name} differs"));
        }
    }
    Ok(na.len())
}
