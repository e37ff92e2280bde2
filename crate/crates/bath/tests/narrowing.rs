use hfine_bath::{
    analytic_distribution, analytic_on_grid, birth_death_steady, narrowing_metrics, BirthDeathChain, NarrowingParams,
};
use hfine_nv::NVParams;
use proptest::prelude::*;

/// N spins at fixed physical σ_eq = 1 rad/μs, δ_0 = σ_eq, R/Γ_dep = `ratio`.
fn uniform(n: usize, ratio: f64) -> NarrowingParams {
    let a_par = 2.0 / (n as f64).sqrt();
    NarrowingParams {
        n_spins: n,
        a_par,
        a_perp: 0.0,
        flip_rate: 1.0,
        gamma_c: 0.0,
        gamma_n: 0.0,
        delta0: 1.0,
        p0: 0.0,
        chi: 0.0,
    }
    .with_rate_ratio(ratio)
}

/// Largest pointwise gap relative to the peak, both normalized on the lattice.
fn sup_deviation(p: &NarrowingParams) -> f64 {
    let bd = birth_death_steady(p).unwrap();
    let eq = analytic_on_grid(p, bd.grid()).unwrap();
    let peak = eq.probabilities().iter().fold(0.0f64, |a, &b| a.max(b));
    bd.probabilities().iter().zip(eq.probabilities()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / peak
}

#[test]
fn birth_death_matches_continuum_at_forty_spins() {
    let p = uniform(40, 1e3);
    let bd = birth_death_steady(&p).unwrap();
    let report = narrowing_metrics(&bd, &p);
    let dev = sup_deviation(&p);
    println!("N=40: sigma/sigma_eq = {:.4}, sup deviation = {dev:.3e}", report.ratio);
    assert!(report.ratio < 0.5);
    assert!(dev < 0.02);
}

#[test]
fn continuum_limit_improves_with_size() {
    let d20 = sup_deviation(&uniform(20, 1e3));
    let d80 = sup_deviation(&uniform(80, 1e3));
    println!("sup deviation N=20 {d20:.3e}, N=80 {d80:.3e}, ratio {:.3}", d20 / d80);
    // The residual is lattice discretization of the peak, so it falls off as 1/√N.
    assert!((1.4..=2.6).contains(&(d20 / d80)));
}

/// NV-derived parameters where the lattice step does not exceed `2δ_s`;
/// below that the lattice cannot represent the central peak.
#[test]
fn lattice_and_continuum_widths_agree() {
    use std::f64::consts::TAU;
    for (omega_a, omega_e) in [(5.0, 1.0), (10.0, 1.0), (10.0, 10.0), (30.0, 10.0)] {
        let nv = NVParams { rabi_a: omega_a * TAU, rabi_e: omega_e * TAU, ..NVParams::default() };
        let p = NarrowingParams::from_nv(400, 0.01 * TAU, 0.3 * TAU, 2.5e-8, 0.0, &nv).unwrap();
        assert!(p.delta_s() >= p.a_par / 2.0);
        let bd = birth_death_steady(&p).unwrap().sigma();
        let an = analytic_distribution(&p).unwrap().sigma();
        println!("Omega_A={omega_a} Omega_E={omega_e}: lattice {:.4}, continuum {:.4}", bd / p.sigma_eq(), an / p.sigma_eq());
        assert!((bd / an - 1.0).abs() < 0.05);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn detailed_balance_holds(n in 2usize..120, r in 0.0f64..10.0, g in 1e-4f64..1.0, d0 in 0.01f64..5.0) {
        let p = NarrowingParams { n_spins: n, a_par: 0.2, a_perp: 0.0, flip_rate: r, gamma_c: g, gamma_n: 0.0, delta0: d0, p0: 0.0, chi: 0.0 };
        let chain = BirthDeathChain::new(n, p.a_par, |h| p.rate_at(h)).unwrap();
        let w = chain.steady_weights();
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for k in 0..n {
            let fwd = w[k] * chain.up_rate(k);
            let back = w[k + 1] * chain.down_rate(k + 1);
            prop_assert!((fwd - back).abs() <= 1e-12 * fwd.max(back).max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn more_depolarization_never_narrows_more(n in 10usize..200, d0 in 0.1f64..3.0, g0 in 1e-5f64..1e-2) {
        let base = NarrowingParams { n_spins: n, a_par: 0.2, a_perp: 0.0, flip_rate: 1.0, gamma_c: g0, gamma_n: 0.0, delta0: d0, p0: 0.0, chi: 0.0 };
        let mut last = 0.0;
        for step in 0..5 {
            let p = NarrowingParams { gamma_c: g0 * 10f64.powi(step), ..base };
            let ratio_bd = narrowing_metrics(&birth_death_steady(&p).unwrap(), &p).ratio;
            let ratio_an = narrowing_metrics(&analytic_distribution(&p).unwrap(), &p).ratio;
            prop_assert!(ratio_bd >= last - 1e-12);
            prop_assert!(ratio_an <= 1.0 + 1e-4);
            last = ratio_bd;
        }
    }
}


#[test]
fn large_chain_approaches_continuum_for_any_profile() {
    use hfine_bath::{birth_death_with_rate, continuum_with_rate, refined_grid};
    // Off-center dip, like a Zeeman offset that the bath must cancel.
    let rate = |h: f64| 0.05 + (h - 0.4).powi(2) / ((h - 0.4).powi(2) + 0.2f64.powi(2));
    let sigma_eq = 1.0;
    let n = 40_000;
    let a_par = 2.0 * sigma_eq / (n as f64).sqrt();
    let lattice = birth_death_with_rate(n, a_par, rate).unwrap();
    let grid = refined_grid(0.4, 6.5, 1e-4, 1e-2);
    let cont = continuum_with_rate(sigma_eq, &grid, rate).unwrap();
    println!("mean {:.4} vs {:.4}, sigma {:.4} vs {:.4}", lattice.mean(), cont.mean(), lattice.sigma(), cont.sigma());
    assert!((lattice.mean() - cont.mean()).abs() < 0.01);
    assert!((lattice.sigma() / cont.sigma() - 1.0).abs() < 0.02);
}
