use hfine_bath::{birth_death_with_rate, continuum_with_rate, refined_grid, FieldDistribution};
use hfine_lindblad::units::{angular_to_mhz, mhz_to_angular};
use hfine_nv::{analytic_steady_state, chi_factors, NVParams};
use rayon::prelude::*;

use super::{ey_population, CommandOutput, RunInput};
use crate::config::{BathModel, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::output::{Column, OutputFile, Table};

/// Grid points per `δ_0` near a dip.
const POINTS_PER_WIDTH: f64 = 30.0;

/// `P_Ey` tabulated on a grid that resolves the dip at zero detuning.
struct Readout {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl Readout {
    fn new(p: &NVParams, half_span: f64, coarse: f64) -> Result<Self> {
        let fine = analytic_steady_state(p).map(|a| a.delta0 / POINTS_PER_WIDTH).unwrap_or(coarse).min(coarse);
        let grid = refined_grid(0.0, half_span, fine, coarse);
        let values = grid.par_iter().map(|&d| ey_population(p, d)).collect::<Result<_>>()?;
        Ok(Self { grid, values })
    }

    /// Linear interpolation, clamped to the ends.
    fn at(&self, x: f64) -> f64 {
        let g = &self.grid;
        let i = g.partition_point(|&v| v <= x);
        if i == 0 {
            return self.values[0];
        }
        if i == g.len() {
            return self.values[g.len() - 1];
        }
        let t = (x - g[i - 1]) / (g[i] - g[i - 1]);
        self.values[i - 1] + t * (self.values[i] - self.values[i - 1])
    }
}

/// Bath under the pumping laser, and the same bath post-selected on
/// `e^{-C P_Ey(ω_e + h)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CptScan {
    pub bath: FieldDistribution,
    pub post_weights: Vec<f64>,
    pub pump_ey: Vec<f64>,
}

pub(crate) fn pumped_bath(cfg: &ScenarioConfig) -> Result<CptScan> {
    let p = cfg.nv_params();
    let chi = chi_factors(&p)?;
    let coupling = (chi.excited_sum() + chi.ground) * cfg.a_perp().powi(2);
    let gamma_c = cfg.gamma_c();
    let sigma = cfg.sigma_eq();
    if !(sigma > 0.0) {
        return Err(CliError::Config("bath needs n_spins > 0 and A_par_MHz > 0".into()));
    }
    let omega_e = p.zeeman;
    let rate_of = |pe: f64| coupling * pe + gamma_c;
    let (bath, grid, pe) = match cfg.run.bath_model {
        BathModel::Continuum => {
            let fine = analytic_steady_state(&p).map(|a| a.delta0 / POINTS_PER_WIDTH).unwrap_or(sigma / 100.0);
            let grid = refined_grid(-omega_e, 6.0 * sigma + omega_e.abs(), fine.min(sigma / 100.0), sigma / 100.0);
            let pe: Vec<f64> = grid.par_iter().map(|&h| ey_population(&p, omega_e + h)).collect::<Result<_>>()?;
            let rates: Vec<f64> = pe.iter().map(|&x| rate_of(x)).collect();
            // The grid is passed through unchanged, so index lookup is exact.
            let lookup = |h: f64| {
                let i = grid.partition_point(|&v| v < h).min(grid.len() - 1);
                rates[i]
            };
            (continuum_with_rate(sigma, &grid, lookup)?, grid, pe)
        }
        BathModel::Lattice => {
            let n = cfg.bath.n_spins;
            let a = cfg.a_par();
            let fields: Vec<f64> = (0..=n).map(|k| a * (k as f64 - n as f64 / 2.0)).collect();
            let pe: Vec<f64> = fields.par_iter().map(|&h| ey_population(&p, omega_e + h)).collect::<Result<_>>()?;
            let lookup = |h: f64| {
                let k = ((h / a) + n as f64 / 2.0).round().clamp(0.0, n as f64) as usize;
                rate_of(pe[k])
            };
            (birth_death_with_rate(n, a, lookup)?, fields, pe)
        }
    };
    let pump_ey: Vec<f64> = if bath.grid() == grid.as_slice() {
        pe
    } else {
        bath.grid().par_iter().map(|&h| ey_population(&p, omega_e + h)).collect::<Result<_>>()?
    };
    let c = cfg.run.photon_count;
    let mut post: Vec<f64> = bath.probabilities().iter().zip(&pump_ey).map(|(q, pe)| q * (-c * pe).exp()).collect();
    let norm: f64 = post.iter().sum();
    if !(norm > 0.0) {
        return Err(CliError::Solver("post-selection weight vanished everywhere".into()));
    }
    post.iter_mut().for_each(|w| *w /= norm);
    Ok(CptScan { bath, post_weights: post, pump_ey })
}

/// Full width at half depth of a dip normalized to 1 far away: the level
/// `(1 + min)/2`, crossed by linear interpolation walking out from the minimum.
pub fn fwhm(x: &[f64], y: &[f64]) -> Option<f64> {
    let (i, &lowest) = y.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1))?;
    let level = 0.5 * (1.0 + lowest);
    let cross = |j: usize, k: usize| x[j] + (level - y[j]) * (x[k] - x[j]) / (y[k] - y[j]);
    let mut l = i;
    while l > 0 && y[l] < level {
        l -= 1;
    }
    let mut r = i;
    while r + 1 < y.len() && y[r] < level {
        r += 1;
    }
    if y[l] < level || y[r] < level {
        return None;
    }
    Some(cross(r - 1, r) - cross(l, l + 1))
}

/// Averaged and post-selected fluorescence against the readout field.
pub fn cpt_scan(input: &RunInput<'_>) -> Result<CommandOutput> {
    let cfg = input.config;
    let mut omegas = cfg.run.omega_re_mhz.values()?;
    omegas.sort_by(f64::total_cmp);
    let scan = pumped_bath(cfg)?;
    let h = scan.bath.grid();
    let reach = h.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let widest = omegas.iter().fold(0.0f64, |m, v| m.max(mhz_to_angular(*v).abs()));
    let coarse = cfg.sigma_eq() / 50.0;

    let mut columns = vec![Column::new("omega_re_MHz", "MHz", "readout Zeeman splitting")];
    let mut curves: Vec<Vec<f64>> = Vec::new();
    let mut out = CommandOutput::default();
    for &re in &cfg.run.omega_a_re_mhz {
        let p = NVParams { rabi_a: mhz_to_angular(re), ..cfg.nv_params() };
        let readout = Readout::new(&p, reach + widest + coarse, coarse).map_err(|e| e.context(format!("Omega_A_re = {re} MHz")))?;
        let fluor = |weights: &[f64]| -> Vec<f64> {
            let raw: Vec<f64> = omegas
                .par_iter()
                .map(|&w| {
                    let w = mhz_to_angular(w);
                    h.iter().zip(weights).map(|(hi, q)| q * readout.at(w + hi)).sum()
                })
                .collect();
            let last = *raw.last().expect("grid is non-empty");
            raw.iter().map(|v| v / last).collect()
        };
        let avg = fluor(scan.bath.probabilities());
        let post = fluor(&scan.post_weights);
        for (tag, curve) in [("avg", &avg), ("post", &post)] {
            if let Some(width) = fwhm(&omegas, curve) {
                out.summary.insert(format!("fwhm_{tag}_MHz_at_{re}MHz"), width);
            }
        }
        columns.push(Column::new(format!("fluor_avg_{re}MHz"), "1", format!("bath-averaged P_Ey at Omega_A_re = {re} MHz")));
        columns.push(Column::new(format!("fluor_post_{re}MHz"), "1", format!("post-selected P_Ey at Omega_A_re = {re} MHz")));
        curves.push(avg);
        curves.push(post);
    }
    let rows = (0..omegas.len()).map(|i| std::iter::once(omegas[i]).chain(curves.iter().map(|c| c[i])).collect()).collect();
    let table = Table { columns, rows };

    let mut bath = Table::new(vec![
        Column::new("h_MHz", "MHz", "nuclear field"),
        Column::new("p_pumped", "1", "bath probability under the pumping laser"),
        Column::new("p_postselected", "1", "bath probability after post-selection"),
        Column::new("P_Ey_pump", "1", "E_y population at omega_e + h during pumping"),
    ]);
    for (i, &hi) in h.iter().enumerate() {
        bath.push(vec![angular_to_mhz(hi), scan.bath.probabilities()[i], scan.post_weights[i], scan.pump_ey[i]]);
    }
    out.summary.insert("bath_sigma_MHz".into(), angular_to_mhz(scan.bath.sigma()));
    out.summary.insert("bath_sigma_eq_MHz".into(), angular_to_mhz(cfg.sigma_eq()));
    let prov = input.provenance("cpt-scan");
    out.files.push(OutputFile { name: "cpt_scan.csv".into(), contents: table.render(&prov, "fluorescence against readout field") });
    out.files.push(OutputFile { name: "cpt_bath.csv".into(), contents: bath.render(&prov, "pumped and post-selected bath") });
    Ok(out)
}
