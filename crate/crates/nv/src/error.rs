use hfine_adiabatic::AdiabaticError;
use hfine_lindblad::LindbladError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NvError {
    #[error(transparent)]
    Lindblad(#[from] LindbladError),
    #[error(transparent)]
    Adiabatic(#[from] AdiabaticError),
    #[error("invalid NV parameters: {0}")]
    InvalidParams(String),
    #[error("hyperfine tensor has no longitudinal component")]
    DegenerateTensor,
    #[error("excited state {state} is degenerate with E_y")]
    SingularDenominator { state: &'static str },
    #[error("nuclear position {distance_nm:.3} nm is too close to the electron")]
    OriginCollision { distance_nm: f64 },
}

pub type Result<T> = std::result::Result<T, NvError>;
