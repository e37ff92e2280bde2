//! Scenario-driven runs of the NV hyperfine models: each command reads a
//! TOML scenario, computes in parallel and writes CSV files plus a manifest.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;

use std::path::Path;
use std::time::Instant;

pub use commands::{CommandOutput, RunInput};
pub use config::ScenarioConfig;
pub use error::{CliError, Result};
pub use manifest::RunManifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SteadyScan,
    N14Scan,
    CptScan,
    Narrowing,
    SqueezingDemo,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SteadyScan => "steady-scan",
            Command::N14Scan => "n14-scan",
            Command::CptScan => "cpt-scan",
            Command::Narrowing => "narrowing",
            Command::SqueezingDemo => "squeezing-demo",
            Command::Validate => "validate",
        }
    }

    pub fn run(self, input: &RunInput<'_>) -> Result<CommandOutput> {
        match self {
            Command::SteadyScan => commands::steady_scan(input),
            Command::N14Scan => commands::n14_scan(input),
            Command::CptScan => commands::cpt_scan(input),
            Command::Narrowing => commands::narrowing(input),
            Command::SqueezingDemo => commands::squeezing_demo(input),
            Command::Validate => commands::validate(input),
        }
    }
}

/// Loads the scenario, runs the command and writes its files and manifest
/// into `out_dir`. A failed validation still writes everything, then errors.
pub fn execute(command: Command, config_path: &Path, out_dir: &Path, seed: Option<u64>) -> Result<RunManifest> {
    let start = Instant::now();
    let (config, text) = ScenarioConfig::load(config_path)?;
    let hash = output::config_hash(&text);
    let seed = seed.unwrap_or(config.run.seed);
    let result = command.run(&RunInput { config: &config, config_hash: &hash, seed })?;

    std::fs::create_dir_all(out_dir)?;
    for f in &result.files {
        std::fs::write(out_dir.join(&f.name), &f.contents)?;
    }
    let manifest = RunManifest {
        command: command.name().into(),
        config_sha256: hash,
        seed,
        code_version: env!("CARGO_PKG_VERSION").into(),
        wall_time_s: start.elapsed().as_secs_f64(),
        files: result.files.iter().map(|f| f.name.clone()).collect(),
        summary: result.summary,
    };
    std::fs::write(out_dir.join(output::MANIFEST_FILE), manifest.to_toml())?;
    match result.failure {
        Some(msg) => Err(CliError::Validation(msg)),
        None => Ok(manifest),
    }
}
