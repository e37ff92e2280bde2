use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{LindbladError, Result};
use crate::operator::{hermitian_deviation, CMatrix, DensityMatrix, Operator};
use crate::superop::{unvectorize, vectorize, Superoperator};

const HERMITICITY_FAILURE: f64 = 1e-8;
const TRACE_DRIFT_PER_TIME: f64 = 1e-9;
/// Largest `d^2` handled by dense exponentiation.
const MAX_VEC_DIM: usize = 4096;

/// `ρ(t)` for every `t` in `t_grid` by exact propagator action.
pub fn evolve(liouvillian: &Superoperator, rho0: &DensityMatrix, t_grid: &[f64]) -> Result<Vec<DensityMatrix>> {
    rho0.as_operator().ensure_basis(liouvillian.basis())?;
    let d = liouvillian.dim();
    if d * d > MAX_VEC_DIM {
        return Err(LindbladError::Integration(format!("d^2 = {} exceeds {MAX_VEC_DIM}", d * d)));
    }
    if t_grid.iter().any(|t| !t.is_finite() || *t < 0.0) || t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(LindbladError::Integration("time grid must be finite, nonnegative and nondecreasing".into()));
    }
    let basis = liouvillian.basis();
    let mut out = Vec::with_capacity(t_grid.len());
    let mut state: DVector<Complex64> = vectorize(rho0.as_operator());
    let mut t_prev = 0.0;
    let mut cached: Option<(f64, CMatrix)> = None;
    for &t in t_grid {
        let dt = t - t_prev;
        if dt > 0.0 {
            let reuse = matches!(&cached, Some((h, _)) if (*h - dt).abs() <= 1e-12 * dt);
            if !reuse {
                cached = Some((dt, liouvillian.propagator(dt)));
            }
            let (_, prop) = cached.as_ref().expect("propagator cached");
            state = prop * &state;
        }
        t_prev = t;
        if t == 0.0 && dt == 0.0 {
            out.push(rho0.clone());
            continue;
        }
        let op: Operator = unvectorize(basis, &state);
        let herm = hermitian_deviation(op.matrix());
        if herm > HERMITICITY_FAILURE {
            return Err(LindbladError::Integration(format!("Hermiticity violation {herm:.3e} at t = {t}")));
        }
        let drift = (op.trace() - Complex64::new(1.0, 0.0)).norm();
        if drift > TRACE_DRIFT_PER_TIME * t.max(1.0) {
            return Err(LindbladError::Integration(format!("trace drift {drift:.3e} at t = {t}")));
        }
        out.push(DensityMatrix::from_hermitized(op).map_err(|e| LindbladError::Integration(e.to_string()))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ElectronModel, JumpChannel};
    use crate::operator::ElectronBasis;
    use crate::steady::steady_state;
    use crate::superop::build_liouvillian;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn driven(omega: f64, gamma: f64) -> ElectronModel {
        let b = ElectronBasis::new(["g", "e"]).unwrap();
        let h = CMatrix::from_row_slice(2, 2, &[c(0.0), c(omega / 2.0), c(omega / 2.0), c(0.0)]);
        ElectronModel::new(Operator::hermitian(b, h).unwrap(), vec![JumpChannel::new(1, 0, gamma)], vec![]).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let l = build_liouvillian(&driven(1.0, 1.0), None).unwrap();
        let rho0 = DensityMatrix::basis_state(l.basis(), 1);
        let out = evolve(&l, &rho0, &[0.0]).unwrap();
        assert_eq!(out[0], rho0);
    }

    #[test]
    fn free_decay() {
        let gamma = 0.7;
        let l = build_liouvillian(&driven(0.0, gamma), None).unwrap();
        let rho0 = DensityMatrix::basis_state(l.basis(), 1);
        let ts = [0.5, 1.0, 2.0, 4.0, 8.0];
        for (t, rho) in ts.iter().zip(evolve(&l, &rho0, &ts).unwrap()) {
            assert!((rho.population(1) - (-gamma * t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn long_time_matches_steady_state() {
        let l = build_liouvillian(&driven(2.0, 1.0), None).unwrap();
        let rho0 = DensityMatrix::basis_state(l.basis(), 0);
        let out = evolve(&l, &rho0, &[10.0, 40.0, 80.0]).unwrap();
        let p = steady_state(&l).unwrap();
        assert!((out[2].matrix() - p.matrix()).norm() < 1e-6);
    }

    #[test]
    fn rejects_decreasing_grid() {
        let l = build_liouvillian(&driven(2.0, 1.0), None).unwrap();
        let rho0 = DensityMatrix::basis_state(l.basis(), 0);
        assert!(evolve(&l, &rho0, &[1.0, 0.5]).is_err());
    }
}
