//! Serialized writer for result tables and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::output::{Format, Table};

pub const MANIFEST_NAME: &str = "manifest.json";

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub records: Vec<String>,
}

/// Single collector through which every table reaches the disk.
#[derive(Debug)]
pub struct Collector {
    dir: PathBuf,
    format: Format,
    files: Vec<FileEntry>,
}

impl Collector {
    pub fn new(dir: &Path, format: Format) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            files: vec![],
        })
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    pub fn write(&mut self, table: &Table) -> Result<()> {
        let name = format!("{}.{}", table.name, self.format.extension());
        if self.files.iter().any(|f| f.path == name) {
            return Err(CliError::Schema {
                table: table.name.clone(),
                message: "table written twice".into(),
            });
        }
        let body = table.render(self.format);
        let path = self.dir.join(&name);
        fs::write(&path, body.as_bytes()).map_err(|e| CliError::io(&path, e))?;
        self.files.push(FileEntry {
            path: name,
            sha256: sha256_hex(body.as_bytes()),
            records: table
                .record_lines(self.format)
                .iter()
                .map(|l| sha256_hex(l.as_bytes()))
                .collect(),
        });
        Ok(())
    }

    /// Writes `manifest.json`; `error` is set when the run stopped early.
    pub fn finish(&self, cfg: &ExperimentConfig, started: &str, error: Option<&CliError>) -> Result<Json> {
        let files: Vec<Json> = self
            .files
            .iter()
            .map(|f| json!({ "path": f.path, "sha256": f.sha256, "record_sha256": f.records }))
            .collect();
        let manifest = json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "experiment": cfg.kind.name(),
            "seed": cfg.seed,
            "workers": cfg.workers,
            "format": cfg.format.extension(),
            "config": serde_json::to_value(&cfg.document).unwrap_or(Json::Null),
            "started": started,
            "finished": now(),
            "complete": error.is_none(),
            "error": error.map(|e| e.to_json()["error"].clone()),
            "files": files,
        });
        let path = self.dir.join(MANIFEST_NAME);
        let text = serde_json::to_string_pretty(&manifest).expect("manifest is valid JSON") + "\n";
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(manifest)
    }
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}
