use std::collections::BTreeMap;

use serde::Serialize;

/// Record of one command invocation, written next to its CSVs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub code_version: String,
    pub wall_time_s: f64,
    pub files: Vec<String>,
    /// Scalar results of the run (fitted widths, optima, pass counts).
    pub summary: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest fields are plain values")
    }
}
