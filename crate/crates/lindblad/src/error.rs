use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LindbladError {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("dimension {dim} exceeds the supported maximum of {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("operator basis mismatch")]
    BasisMismatch,
    #[error("matrix shape {rows}x{cols} does not match basis dimension {dim}")]
    ShapeMismatch { rows: usize, cols: usize, dim: usize },
    #[error("operator is not Hermitian (deviation {deviation:.3e})")]
    NonHermitian { deviation: f64 },
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("model has no dissipation; steady state is not unique")]
    NoDissipation,
    #[error("steady state is degenerate (second smallest |eigenvalue| {gap:.3e})")]
    DegenerateSteadyState { gap: f64 },
    #[error("residual {residual:.3e} exceeds bound {bound:.3e}")]
    Residual { residual: f64, bound: f64 },
    #[error("resolvent is singular at omega = {omega}")]
    SingularResolvent { omega: f64 },
    #[error("steady-state overlap {overlap:.3e} remains after projection")]
    Projection { overlap: f64 },
    #[error("eigensolver failed: {0}")]
    Eigen(String),
    #[error("time integration failed: {0}")]
    Integration(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, LindbladError>;
