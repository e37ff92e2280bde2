use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{LindbladError, Result};
use crate::model::ElectronModel;
use crate::operator::{CMatrix, DensityMatrix, ElectronBasis, Operator};
use crate::superop::{unvectorize, vec_index, vectorize, Superoperator};

const RESIDUAL_TOL: f64 = 1e-10;
const SINGULAR_PIVOT: f64 = 1e-11;
const PROJECTION_TOL: f64 = 1e-10;

fn solve_checked(a: CMatrix, rhs: DVector<Complex64>, omega: f64, scale: f64) -> Result<DVector<Complex64>> {
    let a_norm = a.norm();
    let lu = a.clone().lu();
    let min_pivot = lu.u().diagonal().iter().fold(f64::INFINITY, |m, z| m.min(z.norm()));
    if !(min_pivot > SINGULAR_PIVOT * a_norm) {
        return Err(LindbladError::SingularResolvent { omega });
    }
    let mut y = lu.solve(&rhs).ok_or(LindbladError::SingularResolvent { omega })?;
    let bound = RESIDUAL_TOL * scale;
    let mut residual = (&a * &y - &rhs).norm();
    if residual > bound {
        // One step of iterative refinement.
        let r = &rhs - &a * &y;
        if let Some(dy) = lu.solve(&r) {
            y += dy;
            residual = (&a * &y - &rhs).norm();
        }
    }
    if residual > bound {
        return Err(LindbladError::Residual { residual, bound });
    }
    Ok(y)
}

/// `Y = ∫_0^∞ e^{iωt} e^{Lt} X dt`, i.e. the solution of `(L + iω) Y = -X`.
pub fn liouvillian_integral(liouvillian: &Superoperator, omega: f64, x: &Operator) -> Result<Operator> {
    x.ensure_basis(liouvillian.basis())?;
    let n = liouvillian.dim() * liouvillian.dim();
    let shift = Complex64::new(0.0, omega);
    let mut a = liouvillian.matrix().clone();
    for k in 0..n {
        a[(k, k)] += shift;
    }
    let rhs = -vectorize(x);
    let y = solve_checked(a, rhs, omega, x.norm())?;
    Ok(unvectorize(liouvillian.basis(), &y))
}

/// Zero-frequency integral with the stationary component of `X` removed.
///
/// `X' = X - P Tr X` is integrated; the result is the traceless solution of
/// `L Y = -X'`, obtained by swapping one row of `L` for the trace constraint.
pub fn liouvillian_integral_projected(
    liouvillian: &Superoperator,
    steady: &DensityMatrix,
    x: &Operator,
) -> Result<Operator> {
    x.ensure_basis(liouvillian.basis())?;
    let d = liouvillian.dim();
    let n = d * d;
    let projected = x - &steady.as_operator().scale(x.trace());
    let overlap = projected.trace().norm();
    if overlap > PROJECTION_TOL * x.norm().max(f64::MIN_POSITIVE) {
        return Err(LindbladError::Projection { overlap });
    }
    let mut a = liouvillian.matrix().clone();
    for k in 0..n {
        a[(0, k)] = Complex64::new(0.0, 0.0);
    }
    for i in 0..d {
        a[(0, vec_index(d, i, i))] = Complex64::new(1.0, 0.0);
    }
    let mut rhs = -vectorize(&projected);
    rhs[0] = Complex64::new(0.0, 0.0);
    let y = solve_checked(a, rhs, 0.0, x.norm())?;
    Ok(unvectorize(liouvillian.basis(), &y))
}

/// Closed-form resolvent of the diagonal part of a Liouvillian.
///
/// Acts entrywise: `G(X)_{j'j} = i X_{j'j} / z_{j'j}` with
/// `z_{j'j} = ε_{j'} - ε_j - ω - i (Γ_{j'} + Γ_j)/2` off the diagonal and
/// `z_{jj} = -ω - i Γ^jump_j` on it (dephasing does not empty populations).
#[derive(Debug, Clone)]
pub struct DiagResolvent {
    basis: Arc<ElectronBasis>,
    energies: Vec<f64>,
    widths: Vec<f64>,
    jump_widths: Vec<f64>,
    omega: f64,
}

impl DiagResolvent {
    pub fn new(model: &ElectronModel, extra_hamiltonian: Option<&Operator>, omega: f64) -> Result<Self> {
        let basis = model.basis().clone();
        let d = basis.dim();
        let mut energies: Vec<f64> = (0..d).map(|i| model.hamiltonian().get(i, i).re).collect();
        if let Some(extra) = extra_hamiltonian {
            extra.ensure_basis(&basis)?;
            for (i, e) in energies.iter_mut().enumerate() {
                *e += extra.get(i, i).re;
            }
        }
        let r = Self { basis, energies, widths: model.level_widths(), jump_widths: model.jump_widths(), omega };
        for j1 in 0..d {
            for j in 0..d {
                if r.z(j1, j).norm() == 0.0 {
                    return Err(LindbladError::SingularResolvent { omega });
                }
            }
        }
        Ok(r)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn z(&self, j1: usize, j: usize) -> Complex64 {
        if j1 == j {
            Complex64::new(-self.omega, -self.jump_widths[j])
        } else {
            Complex64::new(
                self.energies[j1] - self.energies[j] - self.omega,
                -0.5 * (self.widths[j1] + self.widths[j]),
            )
        }
    }

    pub fn apply(&self, x: &Operator) -> Result<Operator> {
        x.ensure_basis(&self.basis)?;
        let d = self.basis.dim();
        let i = Complex64::new(0.0, 1.0);
        let m = CMatrix::from_fn(d, d, |j1, j| i * x.get(j1, j) / self.z(j1, j));
        Operator::new(self.basis.clone(), m)
    }
}
