use std::f64::consts::SQRT_2;

use hfine_adiabatic::{AdiabaticSystem, FlipDirection, LongitudinalHfi, TransverseBlock};
use hfine_lindblad::{Complex64, ElectronBasis, Operator};

use crate::error::{NvError, Result};
use crate::model::{ground_spin_z, nv_basis, nv_model};
use crate::params::{NVParams, NvState};
use crate::sites::{CarbonSite, NitrogenSite};

use NvState::*;

/// Line-shape factors of the dominant flip channels, in 1/μs per (rad/μs)².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiFactors {
    /// Ground `|0⟩ → |±1⟩`.
    pub ground: f64,
    /// `E_y → f` for `f` in `A1, A2, E1, E2`.
    pub excited: [(NvState, f64); 4],
    /// Relative depolarization from off-resonant `A_2` pumping (dimensionless).
    pub off_resonant: f64,
}

impl ChiFactors {
    pub fn excited_sum(&self) -> f64 {
        self.excited.iter().map(|(_, c)| c).sum()
    }

    pub fn excited_of(&self, state: NvState) -> f64 {
        self.excited.iter().find(|(s, _)| *s == state).map_or(0.0, |(_, c)| *c)
    }
}

pub fn chi_factors(p: &NVParams) -> Result<ChiFactors> {
    p.validate()?;
    let ground = p.width_ey() / p.zero_field.powi(2);
    let mut excited = [(A1, 0.0); 4];
    for (slot, f) in excited.iter_mut().zip(NvState::FLIP_TARGETS) {
        let gap = p.energies.ey - p.energies.of(f).expect("excited level");
        if gap == 0.0 {
            return Err(NvError::SingularDenominator { state: f.label() });
        }
        *slot = (f, 0.25 * (p.width(f) + p.gamma_phi) / (gap * gap));
    }
    let off_resonant = if p.gamma_ce > 0.0 && p.gamma_s1 > 0.0 {
        let eta1 = p.gamma_ce / p.gamma_s1;
        (p.gamma + p.gamma_phi) * p.rabi_a.powi(2) / (4.0 * eta1 * p.detuning_a2.powi(2) * (p.gamma + p.gamma_s1))
    } else {
        0.0
    };
    Ok(ChiFactors { ground, excited, off_resonant })
}

#[derive(Debug, Clone, Copy)]
pub enum Nucleus<'a> {
    Nitrogen(&'a NitrogenSite),
    Carbon(&'a CarbonSite),
}

/// Raise and lower rates of one nucleus, 1/μs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipRates {
    pub raise: f64,
    pub lower: f64,
}

impl FlipRates {
    pub fn total(&self) -> f64 {
        self.raise + self.lower
    }
}

/// Closed-form flip rate given the `E_y` population, plus an intrinsic
/// direction-unbiased depolarization rate.
pub fn hyperfine_rates(p: &NVParams, nucleus: Nucleus<'_>, p_ey: f64, depolarization: f64) -> Result<FlipRates> {
    if !(0.0..=1.0).contains(&p_ey) {
        return Err(NvError::InvalidParams(format!("E_y population {p_ey} outside [0, 1]")));
    }
    if !(depolarization >= 0.0) || !depolarization.is_finite() {
        return Err(NvError::InvalidParams("depolarization rate must be non-negative".into()));
    }
    let chi = chi_factors(p)?;
    let rate = match nucleus {
        Nucleus::Nitrogen(n) => {
            n.validate()?;
            (n.ground.powi(2) * chi.ground + n.excited.powi(2) * chi.excited_sum()) * p_ey
        }
        Nucleus::Carbon(c) => {
            let a = c.amplitudes();
            let ground = chi.ground * (a.minus_minus.norm_sqr() + a.plus_minus.norm_sqr()) / 8.0;
            let a_path = a.y_minus.norm_sqr() * (chi.excited_of(A1) + chi.excited_of(E1)) / 2.0;
            let e_path = a.x_minus.norm_sqr() * (chi.excited_of(A2) + chi.excited_of(E2)) / 2.0;
            (ground + a_path + e_path) * p_ey
        }
    };
    Ok(FlipRates { raise: rate + depolarization, lower: rate + depolarization })
}

/// Lab energy minus the rotating-frame diagonal, i.e. the energy removed by
/// the frame change. `None` for the singlet.
fn frame_energy(p: &NVParams, s: NvState) -> Option<f64> {
    match s {
        Zero => Some(0.0),
        Bright | Dark => Some(p.zero_field),
        A2 => Some(p.energies.a2 - p.detuning_a2),
        Singlet => None,
        f => p.energies.of(f),
    }
}

/// Oscillation frequency of `|to⟩⟨from|` in the rotating frame.
fn frequency(p: &NVParams, to: NvState, from: NvState) -> f64 {
    let e = |s| frame_energy(p, s).expect("flip blocks avoid the singlet");
    -(e(to) - e(from))
}

fn op(basis: &std::sync::Arc<ElectronBasis>, entries: &[(NvState, NvState, Complex64)]) -> Operator {
    let mut o = Operator::zeros(basis);
    for &(to, from, v) in entries {
        o.set(to.index(), from.index(), o.get(to.index(), from.index()) + v);
    }
    o
}

/// Ground-state blocks for a raising coupling `c_plus S_+ + c_minus S_-`, with
/// `S_± |0⟩` written in the bright/dark basis. Lowering blocks are the pairs.
fn ground_blocks(
    p: &NVParams,
    basis: &std::sync::Arc<ElectronBasis>,
    nucleus: usize,
    c_plus: Complex64,
    c_minus: Complex64,
    tag: &str,
) -> Vec<TransverseBlock> {
    // S_+ = (|b⟩+|d⟩)⟨0| + |0⟩(⟨d|-⟨b|),  S_- = (|d⟩-|b⟩)⟨0| + |0⟩(⟨b|+⟨d|)
    let out = op(basis, &[(Bright, Zero, c_plus - c_minus), (Dark, Zero, c_plus + c_minus)]);
    let back = op(basis, &[(Zero, Bright, c_minus - c_plus), (Zero, Dark, c_plus + c_minus)]);
    let mut blocks = Vec::new();
    for (o, to, from, name) in [(out, Bright, Zero, "0->pm1"), (back, Zero, Bright, "pm1->0")] {
        if o.norm() == 0.0 {
            continue;
        }
        let raise = TransverseBlock {
            nucleus,
            direction: FlipDirection::Raise,
            electron_operator: o,
            frequency: frequency(p, to, from),
            label: format!("{tag}:{name}"),
        };
        blocks.push(raise.paired());
        blocks.push(raise);
    }
    blocks
}

/// One block per excited level `f` for each direction, coupling `E_y → f`.
fn excited_blocks(
    p: &NVParams,
    basis: &std::sync::Arc<ElectronBasis>,
    nucleus: usize,
    amplitude: impl Fn(NvState) -> f64,
    tag: &str,
) -> Vec<TransverseBlock> {
    let mut blocks = Vec::new();
    for f in NvState::FLIP_TARGETS {
        let a = amplitude(f);
        if a == 0.0 {
            continue;
        }
        let o = op(basis, &[(f, Ey, Complex64::new(a / (2.0 * SQRT_2), 0.0))]);
        for direction in [FlipDirection::Raise, FlipDirection::Lower] {
            blocks.push(TransverseBlock {
                nucleus,
                direction,
                electron_operator: o.clone(),
                frequency: frequency(p, f, Ey),
                label: format!("{tag}:Ey->{}", f.label()),
            });
        }
    }
    blocks
}

/// Longitudinal coupling `S_g^z h_z` (¹⁴N first, spin 1; then each ¹³C,
/// spin 1/2) and every transverse flip block.
pub fn decompose_hfi(
    p: &NVParams,
    nitrogen: &NitrogenSite,
    carbons: &[CarbonSite],
) -> Result<(LongitudinalHfi, Vec<TransverseBlock>)> {
    p.validate()?;
    nitrogen.validate()?;
    let basis = nv_basis();
    let mut coefficients = vec![nitrogen.ground];
    let mut spins = vec![2u32];
    let zero = Complex64::new(0.0, 0.0);
    let mut blocks = ground_blocks(p, &basis, 0, zero, Complex64::new(nitrogen.ground / 2.0, 0.0), "N14");
    blocks.extend(excited_blocks(p, &basis, 0, |_| nitrogen.excited, "N14"));
    for (k, c) in carbons.iter().enumerate() {
        let n = k + 1;
        coefficients.push(c.a_z());
        spins.push(1);
        let a = c.amplitudes();
        let tag = format!("C13[{k}]");
        blocks.extend(ground_blocks(p, &basis, n, a.minus_minus / 4.0, a.plus_minus / 4.0, &tag));
        let (ay, ax) = (a.y_minus.norm(), a.x_minus.norm());
        blocks.extend(excited_blocks(
            p,
            &basis,
            n,
            |f| match f {
                A1 | E1 => ay,
                _ => ax,
            },
            &tag,
        ));
    }
    let hfi = LongitudinalHfi::new(ground_spin_z(), coefficients, spins)?;
    Ok((hfi, blocks))
}

/// Adiabatic system for the NV electron with its nuclei, plus all flip blocks.
pub fn nv_system(
    p: &NVParams,
    nitrogen: &NitrogenSite,
    carbons: &[CarbonSite],
) -> Result<(AdiabaticSystem, Vec<TransverseBlock>)> {
    let (hfi, blocks) = decompose_hfi(p, nitrogen, carbons)?;
    Ok((AdiabaticSystem::new(nv_model(p)?, hfi)?, blocks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use hfine_lindblad::units::mhz_to_angular;
    use nalgebra::{Matrix3, Vector3};

    #[test]
    fn chi_by_hand() {
        let p = NVParams::default();
        let chi = chi_factors(&p).unwrap();
        let gamma = 1000.0 / 12.0;
        let d = 2.0 * std::f64::consts::PI * 2870.0;
        assert!((chi.ground - gamma * (1.0 + 2.0 / 800.0) / (d * d)).abs() < 1e-18);
        let gap_a1 = 2.0 * std::f64::consts::PI * 1600.0;
        assert!((chi.excited_of(A1) - 0.25 * 2.0 * gamma / (gap_a1 * gap_a1)).abs() < 1e-18);
        let no_ce = NVParams { gamma_ce: 0.0, ..NVParams::default() };
        assert!((chi_factors(&no_ce).unwrap().ground - gamma / (d * d)).abs() < 1e-18);
        let wide = p.clone().with_detuning_a2(2.0 * p.detuning_a2);
        assert!((chi.off_resonant / chi_factors(&wide).unwrap().off_resonant - 4.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_energy_is_singular() {
        let mut p = NVParams::default();
        p.energies.e1 = p.energies.ey;
        assert_eq!(chi_factors(&p).unwrap_err(), NvError::SingularDenominator { state: "E1" });
    }

    #[test]
    fn closed_form_limits() {
        let p = NVParams::default();
        let n = NitrogenSite::default();
        let zero = hyperfine_rates(&p, Nucleus::Nitrogen(&n), 0.0, 0.0).unwrap();
        assert_eq!(zero.total(), 0.0);
        let ground_only = NitrogenSite { excited: 0.0, ..n };
        let chi = chi_factors(&p).unwrap();
        let r = hyperfine_rates(&p, Nucleus::Nitrogen(&ground_only), 0.2, 0.0).unwrap();
        assert!((r.raise - n.ground.powi(2) * chi.ground * 0.2).abs() < 1e-18);
        let axial = CarbonSite::new(Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, 1.0))).unwrap();
        let r = hyperfine_rates(&p, Nucleus::Carbon(&axial), 0.3, 0.05).unwrap();
        assert_eq!(r.raise, 0.05);
        assert_eq!(r.lower, 0.05);
        assert!(hyperfine_rates(&p, Nucleus::Carbon(&axial), 1.5, 0.0).is_err());
    }

    #[test]
    fn block_inventory() {
        let p = NVParams::default();
        let (hfi, blocks) = decompose_hfi(&p, &NitrogenSite::default(), &[]).unwrap();
        assert_eq!(hfi.coefficients(), &[NitrogenSite::default().ground]);
        assert_eq!(blocks.len(), 4 + 8);
        let axial = CarbonSite::new(Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, mhz_to_angular(0.5)))).unwrap();
        let (hfi, blocks) = decompose_hfi(&p, &NitrogenSite::default(), &[axial]).unwrap();
        assert_eq!(hfi.coefficients().len(), 2);
        assert!(blocks.iter().all(|b| b.nucleus == 0));
        // Ground blocks oscillate at the zero-field splitting.
        let g = blocks.iter().find(|b| b.label == "N14:0->pm1" && b.direction == FlipDirection::Raise).unwrap();
        assert_eq!(g.frequency, -p.zero_field);
    }
}
