use hfine_adiabatic::{AdiabaticSystem, NuclearConfig, RateMethod, TransverseBlock};
use hfine_lindblad::units::mhz_to_angular;
use hfine_nv::{
    dipolar_tensor, hyperfine_rates, nv_system, CarbonSite, NVParams, NitrogenSite, Nucleus, NvState,
    CARBON13_GYROMAGNETIC, ELECTRON_GYROMAGNETIC,
};
use nalgebra::Vector3;

fn summed(sys: &AdiabaticSystem, blocks: &[TransverseBlock], method: RateMethod, nucleus: usize, from: &NuclearConfig) -> (f64, f64) {
    let (mut raise, mut lower) = (0.0, 0.0);
    for b in blocks.iter().filter(|b| b.nucleus == nucleus && b.target(sys.hfi(), from).is_some()) {
        let w = sys.transition_rate(method, b, from).unwrap().value;
        match b.direction {
            hfine_adiabatic::FlipDirection::Raise => raise += w,
            hfine_adiabatic::FlipDirection::Lower => lower += w,
        }
    }
    (raise, lower)
}

fn sites() -> Vec<CarbonSite> {
    [Vector3::new(0.25, 0.1, 0.3), Vector3::new(-0.4, 0.2, -0.15), Vector3::new(0.1, -0.35, 0.5)]
        .into_iter()
        .map(|r| CarbonSite::from_mhz(dipolar_tensor(r, ELECTRON_GYROMAGNETIC, CARBON13_GYROMAGNETIC).unwrap()).unwrap())
        .collect()
}

#[test]
fn generic_rates_match_closed_forms() {
    let p = NVParams::default();
    let nitrogen = NitrogenSite::default();
    let carbons = sites();
    let (sys, blocks) = nv_system(&p, &nitrogen, &carbons).unwrap();
    let from = NuclearConfig::from_twice(std::iter::once(0).chain(carbons.iter().map(|_| -1)).collect());
    let p_ey = sys.pair_steady_state(&from, &from).unwrap().population(NvState::Ey.index());

    let (raise, lower) = summed(&sys, &blocks, RateMethod::Perturbative, 0, &from);
    let closed = hyperfine_rates(&p, Nucleus::Nitrogen(&nitrogen), p_ey, 0.0).unwrap();
    println!("N14 {raise} {lower} closed {}", closed.raise);
    assert!((raise - closed.raise).abs() < 0.2 * closed.raise);
    assert!((lower - closed.lower).abs() < 0.2 * closed.lower);

    for (k, c) in carbons.iter().enumerate() {
        let (raise, _) = summed(&sys, &blocks, RateMethod::Perturbative, k + 1, &from);
        let closed = hyperfine_rates(&p, Nucleus::Carbon(c), p_ey, 0.0).unwrap();
        println!("C13[{k}] {raise} closed {}", closed.raise);
        assert!((raise - closed.raise).abs() < 0.2 * closed.raise);
    }
}

#[test]
fn perturbative_matches_exact_under_weak_drive() {
    let base = NVParams::default();
    let p = NVParams { rabi_a: base.rabi_a * 0.01, rabi_e: base.rabi_e * 0.01, ..base };
    let nitrogen = NitrogenSite::default();
    let carbons = sites();
    let (sys, blocks) = nv_system(&p, &nitrogen, &carbons[..1]).unwrap();
    let from = NuclearConfig::from_twice(vec![0, -1]);
    for b in blocks.iter().filter(|b| b.target(sys.hfi(), &from).is_some()) {
        let exact = sys.transition_rate_exact(b, &from).unwrap().value;
        let pert = sys.transition_rate_perturbative(b, &from).unwrap();
        let split = pert.golden_part.unwrap() + pert.coherent_part.unwrap();
        assert!((split - pert.value).abs() <= 1e-12 * pert.value.abs());
        assert!((pert.value - exact).abs() <= 0.01 * exact.abs(), "{}: {} vs {exact}", b.label, pert.value);
    }
}

#[test]
fn rates_minimized_at_two_photon_resonance() {
    let p = NVParams { zeeman: 0.0, ..NVParams::default() };
    let nitrogen = NitrogenSite { ground: mhz_to_angular(2.2), excited: mhz_to_angular(40.0) };
    let (sys, blocks) = nv_system(&p, &nitrogen, &[]).unwrap();
    let rate = |m: i32| summed(&sys, &blocks, RateMethod::Perturbative, 0, &NuclearConfig::from_twice(vec![m])).0;
    // With no bare splitting, m0 = 0 sits on the two-photon resonance.
    let centre = rate(0);
    assert!(centre < rate(-2));
}

mod randomized {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn random_carbon_sites(x in -0.6f64..0.6, y in -0.6f64..0.6, z in -0.6f64..0.6) {
            let r = Vector3::new(x, y, z);
            prop_assume!(r.norm() > 0.15);
            let tensor = dipolar_tensor(r, ELECTRON_GYROMAGNETIC, CARBON13_GYROMAGNETIC).unwrap();
            let site = match CarbonSite::from_mhz(tensor) {
                Ok(s) => s,
                Err(_) => return Ok(()),
            };
            let p = NVParams::default();
            let (sys, blocks) = nv_system(&p, &NitrogenSite::default(), std::slice::from_ref(&site)).unwrap();
            let from = NuclearConfig::from_twice(vec![2, 1]);
            let p_ey = sys.pair_steady_state(&from, &from).unwrap().population(NvState::Ey.index());
            let (_, lower) = summed(&sys, &blocks, RateMethod::Perturbative, 1, &from);
            let closed = hyperfine_rates(&p, Nucleus::Carbon(&site), p_ey, 0.0).unwrap();
            prop_assert!((lower - closed.lower).abs() <= 0.2 * closed.lower, "{} vs {}", lower, closed.lower);
        }
    }
}
