use hfine_adiabatic::AdiabaticError;
use hfine_nv::NvError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BathError {
    #[error(transparent)]
    Adiabatic(#[from] AdiabaticError),
    #[error(transparent)]
    Nv(#[from] NvError),
    #[error("{count} configurations exceed the enumeration limit {limit}; sample with kinetic Monte Carlo instead")]
    UseKmc { count: f64, limit: usize },
    #[error("grid cannot resolve the central peak: {0}")]
    GridResolution(String),
    #[error("invalid bath parameters: {0}")]
    InvalidParams(String),
    #[error("flip rate {rate} at field {field} rad/us is negative or not finite")]
    BadRate { field: f64, rate: f64 },
}

pub type Result<T> = std::result::Result<T, BathError>;
