use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

/// One artifact of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

/// Artifacts of a run. `passed` is set by runs that check a criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub files: Vec<OutputFile>,
    pub passed: Option<bool>,
}

impl RunOutput {
    pub fn new() -> Self {
        RunOutput { files: Vec::new(), passed: None }
    }

    pub fn push(&mut self, name: &str, contents: String) {
        self.files.push(OutputFile { name: name.to_owned(), contents });
    }

    pub fn push_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::invalid(format!("serialising {name}: {e}")))?;
        self.push(name, text + "\n");
        Ok(())
    }

    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|f| f.name == name).map(|f| f.contents.as_str())
    }

    /// SHA-256 over the file names and contents, in output order.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        for f in &self.files {
            h.update(f.name.as_bytes());
            h.update([0]);
            h.update(f.contents.as_bytes());
            h.update([0]);
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl Default for RunOutput {
    fn default() -> Self {
        Self::new()
    }
}

/// CSV text from a header and rows.
pub fn csv_table<R, I>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: ToString,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::invalid(format!("csv: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        let fields: Vec<String> = row.into_iter().map(|v| v.to_string()).collect();
        w.write_record(&fields).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(format!("csv: {e}")))
}

#[derive(Serialize)]
struct Manifest<'a> {
    kind: &'a str,
    seed: u64,
    version: &'a str,
    config: &'a str,
    files: Vec<&'a str>,
    content_hash: String,
    passed: Option<bool>,
    wall_time_seconds: f64,
}

/// Writes every artifact and `manifest.json` into `dir`.
pub fn write_outputs(dir: &Path, config: &ExperimentConfig, output: &RunOutput, wall_time_seconds: f64) -> Result<()> {
    fs::create_dir_all(dir)?;
    for f in &output.files {
        fs::write(dir.join(&f.name), &f.contents)?;
    }
    let manifest = Manifest {
        kind: config.experiment.kind(),
        seed: config.seed,
        version: env!("CARGO_PKG_VERSION"),
        config: &config.source,
        files: output.files.iter().map(|f| f.name.as_str()).collect(),
        content_hash: output.content_hash(),
        passed: output.passed,
        wall_time_seconds,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::invalid(format!("manifest: {e}")))?;
    fs::write(dir.join("manifest.json"), text + "\n")?;
    Ok(())
}
