//! Result files and their run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// Everything needed to regenerate the files listed in `outputs`.
///
/// `timings` is the only field that differs between identical runs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub version: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub threads: usize,
    pub outputs: Vec<String>,
    pub timings: Vec<StageTiming>,
}

impl RunManifest {
    pub fn new(config: serde_json::Value, seeds: Vec<u64>) -> Self {
        Self {
            command_line: std::env::args().collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            seeds,
            threads: rayon::current_num_threads(),
            outputs: Vec::new(),
            timings: Vec::new(),
        }
    }

    /// Runs `f` and records its wall time under `stage`.
    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push(StageTiming {
            stage: stage.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }
}

/// Where a command writes. Without a directory, single-document commands
/// print to stdout and skip the manifest.
pub struct Sink {
    dir: Option<PathBuf>,
    stem: String,
    manifest: RunManifest,
}

impl Sink {
    pub fn new(dir: Option<&Path>, stem: &str, manifest: RunManifest) -> Result<Self, CliError> {
        if let Some(dir) = dir {
            fs::create_dir_all(dir).map_err(|e| CliError::output(dir, e))?;
        }
        Ok(Self {
            dir: dir.map(Path::to_path_buf),
            stem: stem.to_string(),
            manifest,
        })
    }

    /// Like [`Sink::new`] but falls back to the working directory.
    pub fn files(dir: Option<&Path>, stem: &str, manifest: RunManifest) -> Result<Self, CliError> {
        Self::new(Some(dir.unwrap_or(Path::new("."))), stem, manifest)
    }

    pub fn manifest(&mut self) -> &mut RunManifest {
        &mut self.manifest
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.text(name, &text)
    }

    /// Writes raw text to `name` in the output directory, or to stdout.
    pub fn text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        match &self.dir {
            Some(dir) => {
                let path = dir.join(name);
                fs::write(&path, text).map_err(|e| CliError::output(&path, e))?;
                self.manifest.outputs.push(name.to_string());
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .map_err(|e| CliError::output(Path::new("<stdout>"), e))?;
            }
        }
        Ok(())
    }

    /// RFC 4180 CSV with a header row.
    pub fn csv<R: Serialize>(&mut self, name: &str, rows: &[R]) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))?;
        self.text(name, &String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Writes `<stem>.manifest.json` when there is an output directory.
    pub fn finish(mut self) -> Result<(), CliError> {
        let Some(dir) = self.dir.take() else {
            return Ok(());
        };
        let path = dir.join(format!("{}.manifest.json", self.stem));
        let mut text = serde_json::to_string_pretty(&self.manifest)?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::output(&path, e))
    }
}
