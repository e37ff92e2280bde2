use std::f64::consts::SQRT_2;
use std::sync::Arc;

use hfine_lindblad::{CMatrix, Complex64, DephasingChannel, ElectronBasis, ElectronModel, JumpChannel, Operator};

use crate::error::Result;
use crate::params::{NVParams, NvState};

use NvState::*;

pub fn nv_basis() -> Arc<ElectronBasis> {
    ElectronBasis::new(NvState::ALL.iter().map(|s| s.label())).expect("fixed NV labels")
}

/// Rotating-frame Hamiltonian with the ground Zeeman entry set to `delta_m`
/// (rad/μs), i.e. the bare splitting already shifted by the nuclear field.
pub fn build_nv_hamiltonian(params: &NVParams, delta_m: f64) -> Operator {
    build_on(&nv_basis(), params, delta_m)
}

fn build_on(basis: &Arc<ElectronBasis>, p: &NVParams, delta_m: f64) -> Operator {
    let mut h = CMatrix::zeros(9, 9);
    let mut put = |a: NvState, b: NvState, v: Complex64| {
        h[(a.index(), b.index())] += v;
        if a != b {
            h[(b.index(), a.index())] += v.conj();
        }
    };
    let re = |x: f64| Complex64::new(x, 0.0);
    put(Dark, Dark, re(p.strain));
    put(Bright, Bright, re(-p.strain));
    put(Bright, Dark, re(delta_m));
    put(A2, A2, re(p.detuning_a2));
    put(A1, Bright, re(p.rabi_a / SQRT_2));
    if p.drive_a2 {
        put(A2, Dark, Complex64::new(0.0, p.rabi_a / SQRT_2));
    }
    put(Ey, Zero, re(p.rabi_e / 2.0));
    Operator::hermitian(basis.clone(), h).expect("NV Hamiltonian is Hermitian by construction")
}

/// Ground spin `S_g^z`, which couples bright and dark states.
pub fn ground_spin_z() -> Operator {
    let b = nv_basis();
    let mut o = Operator::zeros(&b);
    o.set(Bright.index(), Dark.index(), Complex64::new(1.0, 0.0));
    o.set(Dark.index(), Bright.index(), Complex64::new(1.0, 0.0));
    o
}

pub fn build_nv_channels(p: &NVParams) -> (Vec<JumpChannel>, Vec<DephasingChannel>) {
    let j = |from: NvState, to: NvState, rate: f64| JumpChannel::new(from.index(), to.index(), rate);
    let mut jumps = vec![j(Ey, Zero, p.gamma), j(Ey, Bright, p.gamma_ce), j(Ey, Dark, p.gamma_ce)];
    for f in NvState::FLIP_TARGETS {
        jumps.push(j(f, Bright, p.gamma / 2.0));
        jumps.push(j(f, Dark, p.gamma / 2.0));
    }
    jumps.extend([
        j(A1, Singlet, p.gamma_s1),
        j(A2, Singlet, p.gamma_s2),
        j(E1, Singlet, p.gamma_s1),
        j(E2, Singlet, p.gamma_s1),
        j(Singlet, Zero, p.gamma_s),
    ]);
    let dephasing = [Ey, A1, A2, E1, E2].iter().map(|s| DephasingChannel::new(s.index(), p.gamma_phi)).collect();
    (jumps, dephasing)
}

/// Full electron model at the bare Zeeman splitting.
pub fn nv_model(params: &NVParams) -> Result<ElectronModel> {
    nv_model_at(params, params.zeeman)
}

/// Electron model with the ground Zeeman entry replaced by `delta_m`.
pub fn nv_model_at(params: &NVParams, delta_m: f64) -> Result<ElectronModel> {
    params.validate()?;
    let (jumps, deph) = build_nv_channels(params);
    Ok(ElectronModel::new(build_nv_hamiltonian(params, delta_m), jumps, deph)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hfine_lindblad::{build_liouvillian, steady_state, LindbladError};

    #[test]
    fn drive_matrix_elements() {
        let p = NVParams::default();
        let h = build_nv_hamiltonian(&p, 0.3);
        let s2 = SQRT_2;
        assert!((h.get(A1.index(), Bright.index()) - Complex64::new(p.rabi_a / s2, 0.0)).norm() < 1e-15);
        assert!((h.get(A2.index(), Dark.index()) - Complex64::new(0.0, p.rabi_a / s2)).norm() < 1e-15);
        assert!((h.get(Ey.index(), Zero.index()) - Complex64::new(p.rabi_e / 2.0, 0.0)).norm() < 1e-15);
        assert_eq!(h.get(Bright.index(), Dark.index()).re, 0.3);
        assert!((&h - &h.dagger()).norm() < 1e-15);
    }

    #[test]
    fn undriven_keeps_only_detuning() {
        let p = NVParams { rabi_a: 0.0, rabi_e: 0.0, strain: 0.0, ..NVParams::default() };
        let h = build_nv_hamiltonian(&p, 0.0);
        for r in 0..9 {
            for c in 0..9 {
                let expect = if r == A2.index() && r == c { p.detuning_a2 } else { 0.0 };
                assert_eq!(h.get(r, c), Complex64::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn ey_width_and_singlet_balance() {
        let p = NVParams::default();
        let model = nv_model(&p).unwrap();
        let widths = model.jump_widths();
        assert!((widths[Ey.index()] - (p.gamma + 2.0 * p.gamma_ce)).abs() < 1e-12);
        for s in NvState::ALL {
            assert!((widths[s.index()] - p.width(s)).abs() < 1e-12, "{s:?}");
        }
        let l = build_liouvillian(&model, None).unwrap();
        let ss = steady_state(&l).unwrap();
        let lhs = p.gamma_s * ss.population(Singlet.index());
        let rhs = p.gamma_s1 * ss.population(A1.index())
            + p.gamma_s2 * ss.population(A2.index())
            + p.gamma_s1 * (ss.population(E1.index()) + ss.population(E2.index()));
        assert!((lhs - rhs).abs() <= 1e-6 * lhs, "{lhs} vs {rhs}");
    }

    #[test]
    fn zero_rates_give_no_dissipation() {
        let p = NVParams {
            gamma: 0.0,
            gamma_s1: 0.0,
            gamma_s2: 0.0,
            gamma_ce: 0.0,
            gamma_s: 0.0,
            gamma_phi: 0.0,
            ..NVParams::default()
        };
        let l = build_liouvillian(&nv_model(&p).unwrap(), None).unwrap();
        assert!(matches!(steady_state(&l), Err(LindbladError::NoDissipation)));
    }
}
