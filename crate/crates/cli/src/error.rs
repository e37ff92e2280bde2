use hfine_adiabatic::AdiabaticError;
use hfine_bath::BathError;
use hfine_lindblad::LindbladError;
use hfine_nv::NvError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) | CliError::Io(_) => 3,
            CliError::Validation(_) => 4,
        }
    }

    /// Prefixes solver messages with where they happened.
    pub fn context(self, what: impl std::fmt::Display) -> Self {
        match self {
            CliError::Solver(m) => CliError::Solver(format!("{what}: {m}")),
            CliError::Config(m) => CliError::Config(format!("{what}: {m}")),
            other => other,
        }
    }
}

impl From<NvError> for CliError {
    fn from(e: NvError) -> Self {
        match e {
            NvError::InvalidParams(_) | NvError::DegenerateTensor | NvError::OriginCollision { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Solver(format!("{other} ({other:?})")),
        }
    }
}

impl From<BathError> for CliError {
    fn from(e: BathError) -> Self {
        match e {
            BathError::Nv(inner) => inner.into(),
            BathError::InvalidParams(_) => CliError::Config(e.to_string()),
            other => CliError::Solver(format!("{other} ({other:?})")),
        }
    }
}

impl From<LindbladError> for CliError {
    fn from(e: LindbladError) -> Self {
        CliError::Solver(format!("{e} ({e:?})"))
    }
}

impl From<AdiabaticError> for CliError {
    fn from(e: AdiabaticError) -> Self {
        CliError::Solver(format!("{e} ({e:?})"))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
