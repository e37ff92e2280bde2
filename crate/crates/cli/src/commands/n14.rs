use std::collections::HashMap;

use hfine_adiabatic::{relaxation_generator, Transition};
use hfine_lindblad::units::mhz_to_angular;
use hfine_nv::{chi_factors, NVParams};
use rayon::prelude::*;

use super::{ey_population, CommandOutput, RunInput};
use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};
use crate::output::{Column, OutputFile, Table};

/// Steady ¹⁴N polarization and relaxation at one Λ-laser Rabi frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct N14Point {
    pub omega_a_mhz: f64,
    /// Populations of `m_0 = -1, 0, +1`.
    pub populations: [f64; 3],
    /// Inverse slowest relaxation rate of the ¹⁴N chain, μs.
    pub narrowing_time_us: f64,
    /// Inverse mean total ¹⁴N flip rate, μs.
    pub flip_time_us: f64,
}

/// ¹⁴N (spin 1) jointly with a uniform ¹³C bath treated as one collective
/// spin of length N/2. Both share the detuning `ω_e + A_g m_0 + A_∥ M`, so
/// the ¹³C field spreads the ¹⁴N resonance as it would in the laboratory.
pub(crate) fn n14_point(cfg: &ScenarioConfig, p: &NVParams) -> Result<N14Point> {
    let chi = chi_factors(p)?;
    let site = cfg.nitrogen_site();
    site.validate()?;
    let n = cfg.bath.n_spins;
    let a_par = cfg.a_par();
    let a_perp = cfg.a_perp();
    let (gamma_c, gamma_n) = (cfg.gamma_c(), cfg.gamma_n());
    let coupling_n = site.ground.powi(2) * chi.ground + site.excited.powi(2) * chi.excited_sum();
    let coupling_c = (chi.excited_sum() + chi.ground) * a_perp * a_perp;

    let carbons = n + 1;
    let index = |m0: i32, k: usize| ((m0 + 1) as usize) * carbons + k;
    let detuning = |m0: i32, k: usize| p.zeeman + site.ground * m0 as f64 + a_par * (k as f64 - n as f64 / 2.0);

    // Steady states are shared between configurations with equal detuning.
    let mut keys: Vec<i64> = Vec::new();
    let mut key_of = HashMap::new();
    for m0 in -1..=1 {
        for k in 0..carbons {
            let key = (detuning(m0, k) * 1e9).round() as i64;
            key_of.entry(key).or_insert_with(|| {
                keys.push(key);
                keys.len() - 1
            });
        }
    }
    let p_ey: Vec<f64> =
        keys.par_iter().map(|&key| ey_population(p, key as f64 * 1e-9)).collect::<Result<_>>()?;
    let ey = |m0: i32, k: usize| p_ey[key_of[&((detuning(m0, k) * 1e9).round() as i64)]];

    let rate_n = |m0: i32, k: usize| coupling_n * ey(m0, k) + gamma_n;
    let mut transitions = Vec::new();
    for m0 in -1..=1 {
        for k in 0..carbons {
            let from = index(m0, k);
            let w = rate_n(m0, k);
            for to in [m0 - 1, m0 + 1] {
                if (-1..=1).contains(&to) {
                    transitions.push(Transition { from, to: index(to, k), rate: w });
                }
            }
            let lambda = coupling_c * ey(m0, k) + gamma_c;
            if k < n {
                transitions.push(Transition { from, to: index(m0, k + 1), rate: lambda * (n - k) as f64 });
            }
            if k > 0 {
                transitions.push(Transition { from, to: index(m0, k - 1), rate: lambda * k as f64 });
            }
        }
    }
    let joint = relaxation_generator(3 * carbons, &transitions)?.stationary()?;

    let mut populations = [0.0; 3];
    let mut mean_rate = [0.0; 3];
    for (slot, m0) in (-1..=1).enumerate() {
        let block = &joint[index(m0, 0)..index(m0, 0) + carbons];
        populations[slot] = block.iter().sum();
        if populations[slot] > 0.0 {
            mean_rate[slot] =
                block.iter().enumerate().map(|(k, q)| q * rate_n(m0, k)).sum::<f64>() / populations[slot];
        } else {
            mean_rate[slot] = (0..carbons).map(|k| rate_n(m0, k)).sum::<f64>() / carbons as f64;
        }
    }
    // Effective ¹⁴N chain with the ¹³C-averaged rates.
    let reduced = relaxation_generator(
        3,
        &[
            Transition { from: 0, to: 1, rate: mean_rate[0] },
            Transition { from: 1, to: 0, rate: mean_rate[1] },
            Transition { from: 1, to: 2, rate: mean_rate[1] },
            Transition { from: 2, to: 1, rate: mean_rate[2] },
        ],
    )?;
    let slowest = reduced.slowest_relaxation_rate().unwrap_or(0.0);
    let total: f64 = (0..3).map(|i| populations[i] * reduced.out_rates()[i]).sum();
    Ok(N14Point {
        omega_a_mhz: 0.0,
        populations,
        narrowing_time_us: 1.0 / slowest,
        flip_time_us: 1.0 / total,
    })
}

/// ¹⁴N polarization against Ω_A, with and without the off-resonant `A_2` drive.
pub fn n14_scan(input: &RunInput<'_>) -> Result<CommandOutput> {
    let cfg = input.config;
    let base = cfg.nv_params();
    let omegas = cfg.run.omega_a_mhz.values()?;
    let points: Vec<(N14Point, N14Point)> = omegas
        .par_iter()
        .map(|&w| {
            let on = NVParams { rabi_a: mhz_to_angular(w), drive_a2: true, ..base.clone() };
            let off = NVParams { drive_a2: false, ..on.clone() };
            let ctx = |e: CliError| e.context(format!("Omega_A = {w} MHz"));
            let a = n14_point(cfg, &on).map_err(ctx)?;
            let b = n14_point(cfg, &off).map_err(ctx)?;
            Ok((N14Point { omega_a_mhz: w, ..a }, N14Point { omega_a_mhz: w, ..b }))
        })
        .collect::<Result<_>>()?;

    let columns = vec![
        Column::new("Omega_A_MHz", "MHz", "Lambda-laser Rabi frequency"),
        Column::new("pop_m0_minus", "1", "steady population of m0 = -1"),
        Column::new("pop_m0_0", "1", "steady population of m0 = 0"),
        Column::new("pop_m0_plus", "1", "steady population of m0 = +1"),
        Column::new("narrowing_time_us", "us", "inverse slowest relaxation rate of the 14N populations"),
        Column::new("flip_time_us", "us", "inverse mean total 14N flip rate"),
        Column::new("pop_m0_0_no_A2", "1", "population of m0 = 0 with the off-resonant A2 drive removed"),
    ];
    let rows = points
        .iter()
        .map(|(a, b)| {
            let [lo, mid, hi] = a.populations;
            vec![a.omega_a_mhz, lo, mid, hi, a.narrowing_time_us, a.flip_time_us, b.populations[1]]
        })
        .collect();
    let table = Table { columns, rows };

    let mut out = CommandOutput::default();
    if let Some((best, _)) = points.iter().max_by(|x, y| x.0.populations[1].total_cmp(&y.0.populations[1])) {
        out.summary.insert("optimum_Omega_A_MHz".into(), best.omega_a_mhz);
        out.summary.insert("optimum_pop_m0_0".into(), best.populations[1]);
        out.summary.insert("optimum_narrowing_time_us".into(), best.narrowing_time_us);
        out.summary.insert("optimum_flip_time_us".into(), best.flip_time_us);
    }
    let pops: Vec<f64> = points.iter().map(|(a, _)| a.populations[1]).collect();
    out.summary.insert("local_maxima".into(), local_maxima(&pops) as f64);
    out.files.push(OutputFile {
        name: "n14_scan.csv".into(),
        contents: table.render(&input.provenance("n14-scan"), "14N polarization against Omega_A"),
    });
    Ok(out)
}

/// Interior strict local maxima, plus a maximum sitting at either end.
pub fn local_maxima(values: &[f64]) -> usize {
    let n = values.len();
    if n < 2 {
        return n;
    }
    let mut count = 0;
    for i in 0..n {
        let left = i == 0 || values[i] > values[i - 1];
        let right = i == n - 1 || values[i] > values[i + 1];
        if left && right {
            count += 1;
        }
    }
    count
}
