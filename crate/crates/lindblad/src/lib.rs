//! Dense Lindblad master-equation machinery for small electron models.
//!
//! Operators are `d x d` complex matrices over a labelled basis. Superoperators
//! act on column-stacked operators: entry `(r, c)` of an operator sits at
//! vector index `r + d * c`, so that `vec(A X B) = (B^T ⊗ A) vec(X)`.
//!
//! All frequencies and rates are angular, in rad/μs.

mod error;
mod evolve;
mod model;
mod operator;
mod resolvent;
mod serialize;
mod split;
mod steady;
mod superop;

pub mod units;

pub use error::{LindbladError, Result};
pub use evolve::evolve;
pub use model::{DephasingChannel, ElectronModel, JumpChannel};
pub use operator::{CMatrix, DensityMatrix, ElectronBasis, Operator, MAX_DIM};
pub use resolvent::{liouvillian_integral, liouvillian_integral_projected, DiagResolvent};
pub use serialize::{read_operator_csv, read_superoperator_csv, write_operator_csv, write_superoperator_csv};
pub use split::split_diag_offdiag;
pub use steady::steady_state;
pub use superop::{build_liouvillian, Superoperator};

pub use num_complex::Complex64;
