//! Run manifests: the effective configuration, inputs, outputs, and
//! per-image status of a CLI run, written atomically at run end.
//!
//! Everything except the wall-clock timing fields is deterministic for a
//! given `(inputs, config, seed)`.

use std::path::Path;
use std::time::Duration;

use serde::Serialize;

use crate::error::DataError;
use crate::masks::write_atomic;
use crate::run_config::RunConfig;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: RunConfig,
    pub seed: u64,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub images: Vec<ImageStatus>,
    pub total_millis: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImageStatus {
    pub name: String,
    pub status: Status,
    pub millis: u128,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum Status {
    Ok,
    Skipped(String),
    Failed(String),
}

impl RunManifest {
    pub fn new(command: &str, config: RunConfig, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            config,
            seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
            images: Vec::new(),
            total_millis: 0,
        }
    }

    pub fn record(&mut self, name: &str, status: Status, elapsed: Duration) {
        self.images.push(ImageStatus {
            name: name.to_string(),
            status,
            millis: elapsed.as_millis(),
        });
    }

    /// Sorts per-image entries by name so the manifest layout does not
    /// depend on worker scheduling.
    pub fn finalize(&mut self, total: Duration) {
        self.images.sort_by(|a, b| a.name.cmp(&b.name));
        self.total_millis = total.as_millis();
    }

    pub fn n_failed(&self) -> usize {
        self.images
            .iter()
            .filter(|s| matches!(s.status, Status::Failed(_)))
            .count()
    }

    pub fn write(&self, dir: &Path) -> Result<(), DataError> {
        let path = dir.join("manifest.json");
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        write_atomic(&path, json.as_bytes())
    }
}
