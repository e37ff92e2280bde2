use hfine_lindblad::LindbladError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdiabaticError {
    #[error(transparent)]
    Lindblad(#[from] LindbladError),
    #[error("at nuclear field h = {field} rad/us: {source}")]
    AtField { field: f64, source: LindbladError },
    #[error("invalid hyperfine description: {0}")]
    InvalidHfi(String),
    #[error("configuration {0} is outside the nuclear spin ranges")]
    InvalidConfig(String),
    #[error("block cannot act on configuration {0}")]
    BlockNotApplicable(String),
    #[error("rate {rate:.3e} from state {from} to {to} is below the negative tolerance")]
    NegativeRate { from: usize, to: usize, rate: f64 },
    #[error("transition index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("stationary distribution not unique or not found: {0}")]
    Stationary(String),
}

pub type Result<T> = std::result::Result<T, AdiabaticError>;

pub(crate) fn at_field(field: f64) -> impl Fn(LindbladError) -> AdiabaticError {
    move |source| AdiabaticError::AtField { field, source }
}
