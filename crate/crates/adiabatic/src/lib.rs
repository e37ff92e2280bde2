//! Adiabatic elimination of a fast, damped electron coupled to slow nuclei.
//!
//! The longitudinal coupling `K_m = O h_m` enters every electron Liouvillian;
//! transverse blocks `V^(p,m)` drive nuclear flips whose rates follow from
//! resolvent integrals over the electron steady state.

mod error;
mod generator;
mod hfi;
mod mean_field;
mod rates;
mod report;
mod system;
mod table;
#[cfg(test)]
mod testutil;

pub use error::{AdiabaticError, Result};
pub use generator::{relaxation_generator, RelaxationGenerator, Transition, NEGATIVE_RATE_FLOOR};
pub use hfi::{ladder_element, FlipDirection, LongitudinalHfi, NuclearConfig, TransverseBlock};
pub use mean_field::{mean_field_generator, MeanField};
pub use rates::{single_transition, RateMethod, RateResult, SingleTransitionParts};
pub use report::{timescale_report, ValidityReport, SEPARATION_THRESHOLD};
pub use system::{electron_steady_map, AdiabaticSystem, SteadyStateMap, FIELD_QUANTUM};
pub use table::{rate_table_csv, RateRow, RATE_TABLE_HEADER};
