use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::config::LoadedConfig;
use crate::error::{CliError, CliResult};

/// Files and results produced by one command, before anything is written.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub files: Vec<(String, Vec<u8>)>,
    pub summary: Map<String, Value>,
    pub warnings: Vec<String>,
}

impl RunOutput {
    pub fn file(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.summary.insert(key.to_string(), v);
    }
}

#[derive(Debug, Serialize)]
struct OutputEntry {
    file: String,
    sha256: String,
    bytes: usize,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    tool: &'static str,
    version: &'static str,
    config_path: String,
    config_sha256: &'a str,
    overrides: &'a [String],
    parameters: Value,
    summary: &'a Map<String, Value>,
    warnings: &'a [String],
    outputs: Vec<OutputEntry>,
    /// Wall-clock time of the run; the only field that changes between reruns.
    timestamp_unix: u64,
}

/// Writes every output file into `out_dir`, then `<command>.manifest.json`.
/// Returns the paths written, manifest last.
pub fn write_all(
    out_dir: &Path,
    command: &str,
    config_path: &Path,
    loaded: &LoadedConfig,
    overrides: &[String],
    output: &RunOutput,
) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(CliError::io(out_dir.display()))?;
    let mut written = Vec::new();
    let mut entries = Vec::new();
    for (name, bytes) in &output.files {
        let path = out_dir.join(name);
        fs::write(&path, bytes).map_err(CliError::io(path.display()))?;
        entries.push(OutputEntry {
            file: name.clone(),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len(),
        });
        written.push(path);
    }
    let manifest = Manifest {
        command,
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config_path: config_path.display().to_string(),
        config_sha256: &loaded.sha256,
        overrides,
        parameters: serde_json::to_value(&loaded.config).unwrap_or(Value::Null),
        summary: &output.summary,
        warnings: &output.warnings,
        outputs: entries,
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    let path = out_dir.join(format!("{command}.manifest.json"));
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Numeric(format!("manifest serialisation: {e}")))?;
    text.push('\n');
    fs::write(&path, text).map_err(CliError::io(path.display()))?;
    written.push(path);
    Ok(written)
}
