mod cpt;
mod n14;
mod narrowing;
mod squeezing;
mod steady;
mod validate;

use std::collections::BTreeMap;

use hfine_lindblad::{build_liouvillian, steady_state, DensityMatrix};
use hfine_nv::{nv_model_at, NVParams, NvState};

use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::output::{OutputFile, Provenance};

pub use cpt::{cpt_scan, fwhm, CptScan};
pub use n14::{local_maxima, n14_scan, N14Point};
pub use narrowing::narrowing;
pub use squeezing::{squeezing_demo, squeezing_points, SqueezingPoint};
pub use steady::steady_scan;
pub use validate::{validate, validation_checks, CheckResult};

/// Files and scalar results of one command. `failure` is set by `validate`
/// when a check did not pass; the files are still written.
#[derive(Debug, Clone, Default)]
pub struct CommandOutput {
    pub files: Vec<OutputFile>,
    pub summary: BTreeMap<String, f64>,
    pub failure: Option<String>,
}

/// What every command receives.
pub struct RunInput<'a> {
    pub config: &'a ScenarioConfig,
    pub config_hash: &'a str,
    pub seed: u64,
}

impl RunInput<'_> {
    pub(crate) fn provenance<'b>(&'b self, command: &'b str) -> Provenance<'b> {
        Provenance { command, config_hash: self.config_hash, seed: self.seed }
    }
}

/// Numeric NV steady state with the ground Zeeman entry set to `delta` (rad/μs).
pub(crate) fn nv_steady(p: &NVParams, delta: f64) -> Result<DensityMatrix> {
    let model = nv_model_at(p, delta)?;
    Ok(steady_state(&build_liouvillian(&model, None)?)?)
}

pub(crate) fn ey_population(p: &NVParams, delta: f64) -> Result<f64> {
    Ok(nv_steady(p, delta)?.population(NvState::Ey.index()).clamp(0.0, 1.0))
}
