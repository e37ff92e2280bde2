//! Nuclear spin bath dynamics driven by field-dependent flip rates.

mod analytic;
mod birth_death;
mod distribution;
mod error;
mod kmc;
mod layout;
mod master;
mod metrics;
mod params;

pub use analytic::{
    adaptive_grid, analytic_distribution, analytic_on_grid, continuum_with_rate, narrowed_density, refined_grid,
};
pub use birth_death::{birth_death_steady, birth_death_with_rate, BirthDeathChain};
pub use distribution::FieldDistribution;
pub use error::{BathError, Result};
pub use kmc::{kmc_sample, random_configs, KmcEvent, KmcHorizon, KmcOptions, KmcResult, KmcTrajectory};
pub use layout::{BathConfig, BathLayout};
pub use master::{
    configuration_master_equation, ConfigurationMasterEquation, Horizon, Populations, RateProvider,
    ENUMERATION_LIMIT,
};
pub use metrics::{
    narrowing_metrics, optimal_narrowing, NarrowingReport, NarrowingSweep, OptimalNarrowing, ScanPoint,
    NARROWED_BELOW,
};
pub use params::NarrowingParams;
