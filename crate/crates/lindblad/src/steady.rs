use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{LindbladError, Result};
use crate::operator::DensityMatrix;
use crate::superop::{unvectorize, vec_index, Superoperator};

const RESIDUAL_TOL: f64 = 1e-10;
const DEGENERACY_TOL: f64 = 1e-9;
/// Pivots below this fraction of ‖L‖ trigger the eigenvalue check.
const SUSPICIOUS_PIVOT: f64 = 1e-7;

/// Null vector of `liouvillian` with unit trace.
///
/// Row 0 of the `d^2` linear system is replaced by the trace constraint and the
/// result is solved by dense LU. A small pivot triggers an eigenvalue check that
/// separates a genuinely degenerate null space from a merely slow mode.
pub fn steady_state(liouvillian: &Superoperator) -> Result<DensityMatrix> {
    if !liouvillian.is_dissipative() {
        return Err(LindbladError::NoDissipation);
    }
    let d = liouvillian.dim();
    let n = d * d;
    let l_norm = liouvillian.norm();
    let mut m = liouvillian.matrix().clone();
    for k in 0..n {
        m[(0, k)] = Complex64::new(0.0, 0.0);
    }
    for i in 0..d {
        m[(0, vec_index(d, i, i))] = Complex64::new(1.0, 0.0);
    }
    let mut rhs = DVector::zeros(n);
    rhs[0] = Complex64::new(1.0, 0.0);

    let lu = m.lu();
    let u = lu.u();
    let min_pivot = u.diagonal().iter().fold(f64::INFINITY, |a, z| a.min(z.norm()));
    if min_pivot < SUSPICIOUS_PIVOT * l_norm {
        check_degeneracy(liouvillian, l_norm)?;
    }
    let x = lu.solve(&rhs).ok_or(LindbladError::DegenerateSteadyState { gap: 0.0 })?;

    let residual = (liouvillian.matrix() * &x).norm();
    let bound = RESIDUAL_TOL * l_norm;
    if residual > bound {
        return Err(LindbladError::Residual { residual, bound });
    }
    DensityMatrix::from_hermitized(unvectorize(liouvillian.basis(), &x))
}

fn check_degeneracy(liouvillian: &Superoperator, l_norm: f64) -> Result<()> {
    let mut mags: Vec<f64> = liouvillian.eigenvalues()?.iter().map(|z| z.norm()).collect();
    mags.sort_by(|a, b| a.total_cmp(b));
    let gap = mags.get(1).copied().unwrap_or(f64::INFINITY);
    if gap < DEGENERACY_TOL * l_norm {
        Err(LindbladError::DegenerateSteadyState { gap })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ElectronModel, JumpChannel};
    use crate::operator::{CMatrix, ElectronBasis, Operator};
    use crate::superop::build_liouvillian;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    pub(crate) fn driven(omega: f64, gamma: f64) -> ElectronModel {
        let b = ElectronBasis::new(["g", "e"]).unwrap();
        let h = CMatrix::from_row_slice(2, 2, &[c(0.0), c(omega / 2.0), c(omega / 2.0), c(0.0)]);
        ElectronModel::new(Operator::hermitian(b, h).unwrap(), vec![JumpChannel::new(1, 0, gamma)], vec![]).unwrap()
    }

    /// Fixed-step RK4 on the vectorized master equation.
    fn rk4_long_time(l: &Superoperator, rho0: &Operator, t_end: f64, steps: usize) -> Operator {
        let m = l.matrix();
        let h = t_end / steps as f64;
        let mut y = DVector::from_column_slice(rho0.matrix().as_slice());
        let hc = c(h);
        for _ in 0..steps {
            let k1 = m * &y;
            let k2 = m * (&y + &k1 * (hc * 0.5));
            let k3 = m * (&y + &k2 * (hc * 0.5));
            let k4 = m * (&y + &k3 * hc);
            y += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * (hc / 6.0);
        }
        unvectorize(rho0.basis(), &y)
    }

    #[test]
    fn decay_only_relaxes_to_ground() {
        let l = build_liouvillian(&driven(0.0, 1.0), None).unwrap();
        let p = steady_state(&l).unwrap();
        assert!((p.population(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn driven_two_level_matches_ode_oracle() {
        let (omega, gamma) = (2.0, 1.0);
        let l = build_liouvillian(&driven(omega, gamma), None).unwrap();
        let p = steady_state(&l).unwrap();
        let b = l.basis().clone();
        let oracle = rk4_long_time(&l, &Operator::projector(&b, 0), 50.0 / gamma, 20_000);
        assert!((p.population(1) - oracle.get(1, 1).re).abs() < 1e-6);
        assert!((p.matrix() - oracle.matrix()).norm() < 1e-6);
        // The closed form, once the oracle agrees with it.
        let closed = omega * omega / (gamma * gamma + 2.0 * omega * omega);
        assert!((oracle.get(1, 1).re - closed).abs() < 1e-6);
        assert!((p.population(1) - closed).abs() < 1e-12);
        assert!((p.as_operator().trace() - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn residual_bound_holds() {
        let l = build_liouvillian(&driven(5.0, 0.3), None).unwrap();
        let p = steady_state(&l).unwrap();
        let r = l.apply(p.as_operator()).unwrap();
        assert!(r.norm() <= 1e-10 * l.norm());
    }

    #[test]
    fn closed_system_rejected() {
        let m = driven(1.0, 0.0);
        let l = build_liouvillian(&m, None).unwrap();
        assert_eq!(steady_state(&l), Err(LindbladError::NoDissipation));
        let closed = ElectronModel::closed(m.hamiltonian().clone()).unwrap();
        assert_eq!(steady_state(&build_liouvillian(&closed, None).unwrap()), Err(LindbladError::NoDissipation));
    }

    #[test]
    fn decoupled_blocks_are_degenerate() {
        let b = ElectronBasis::new(["a", "b", "c", "d"]).unwrap();
        let m = ElectronModel::new(
            Operator::zeros(&b),
            vec![JumpChannel::new(1, 0, 1.0), JumpChannel::new(3, 2, 2.0)],
            vec![],
        )
        .unwrap();
        let l = build_liouvillian(&m, None).unwrap();
        assert!(matches!(steady_state(&l), Err(LindbladError::DegenerateSteadyState { .. })));
    }
}
