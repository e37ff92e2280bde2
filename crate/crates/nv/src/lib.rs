//! NV-center electron under coherent population trapping: the nine-level
//! rotating-frame model, its hyperfine couplings to the ¹⁴N and ¹³C nuclei,
//! and closed-form approximations of the steady state and flip rates.
//!
//! Inputs quoted in MHz are ordinary frequencies; everything stored here is
//! angular (rad/μs) or a rate in 1/μs.

mod analytic;
mod error;
mod hyperfine;
mod model;
mod params;
mod sites;

pub use analytic::{analytic_steady_state, fit_cpt_dip, AnalyticSteadyState, DipFit, PredictedPopulations};
pub use error::{NvError, Result};
pub use hyperfine::{chi_factors, decompose_hfi, hyperfine_rates, nv_system, ChiFactors, FlipRates, Nucleus};
pub use model::{build_nv_channels, build_nv_hamiltonian, ground_spin_z, nv_basis, nv_model, nv_model_at};
pub use params::{ExcitedEnergies, NVParams, NvState};
pub use sites::{
    dipolar_tensor, local_frame, CarbonSite, LocalFrame, NitrogenSite, TransverseAmplitudes, CARBON13_GYROMAGNETIC,
    ELECTRON_GYROMAGNETIC,
};
