use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const MANIFEST_SCHEMA: &str = "gdv-manifest/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunError {
    pub name: String,
    pub message: String,
    pub exit_code: i32,
}

/// Record of one CLI invocation, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Every option after merging flags, config file and defaults.
    pub config: Value,
    pub seeds: Vec<u64>,
    pub toolkit_version: String,
    pub threads: usize,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<PathBuf>,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<RunError>,
}

impl RunManifest {
    pub fn new(subcommand: &str, threads: usize) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            config: Value::Null,
            seeds: Vec::new(),
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            threads,
            wall_clock_seconds: 0.0,
            outputs: Vec::new(),
            status: "running".into(),
            error: None,
        }
    }

    pub fn finish(&mut self, elapsed: Duration, error: Option<RunError>) {
        self.wall_clock_seconds = elapsed.as_secs_f64();
        self.status = if error.is_some() { "error" } else { "ok" }.into();
        self.error = error;
    }

    pub fn write(&self, path: &Path) -> gdv_core::Result<()> {
        gdv_core::io::write_json(path, MANIFEST_SCHEMA, self)
    }
}
