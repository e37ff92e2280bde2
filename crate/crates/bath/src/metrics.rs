use std::fmt::Write as _;

use hfine_nv::{analytic_steady_state, NVParams};
use rayon::prelude::*;

use crate::analytic::analytic_distribution;
use crate::distribution::FieldDistribution;
use crate::error::{BathError, Result};
use crate::params::NarrowingParams;

/// Ratio below which the bath counts as narrowed.
pub const NARROWED_BELOW: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NarrowingReport {
    pub sigma: f64,
    pub sigma_eq: f64,
    pub ratio: f64,
    pub delta_s: f64,
    pub narrowed: bool,
    /// `(Ω_A, δ_0)` at the scanned optimum.
    pub optimum: Option<(f64, f64)>,
    /// `1/(total flip rate)` at the optimum, μs.
    pub narrowing_time: Option<f64>,
    /// Inverse slowest relaxation rate of the population master equation, μs.
    pub relaxation_time: Option<f64>,
}

impl NarrowingReport {
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "sigma_rad_per_us={:.9e}", self.sigma);
        let _ = writeln!(s, "sigma_eq_rad_per_us={:.9e}", self.sigma_eq);
        let _ = writeln!(s, "ratio={:.9e}", self.ratio);
        let _ = writeln!(s, "delta_s_rad_per_us={:.9e}", self.delta_s);
        let _ = writeln!(s, "narrowed={}", self.narrowed);
        if let Some((rabi, d0)) = self.optimum {
            let _ = writeln!(s, "optimum_omega_A_rad_per_us={rabi:.9e}");
            let _ = writeln!(s, "optimum_delta0_rad_per_us={d0:.9e}");
        }
        if let Some(t) = self.narrowing_time {
            let _ = writeln!(s, "narrowing_time_us={t:.9e}");
        }
        if let Some(t) = self.relaxation_time {
            let _ = writeln!(s, "relaxation_time_us={t:.9e}");
        }
        s
    }
}

pub fn narrowing_metrics(dist: &FieldDistribution, params: &NarrowingParams) -> NarrowingReport {
    let sigma = dist.sigma();
    let sigma_eq = params.sigma_eq();
    let ratio = sigma / sigma_eq;
    NarrowingReport {
        sigma,
        sigma_eq,
        ratio,
        delta_s: params.delta_s(),
        narrowed: ratio < NARROWED_BELOW,
        optimum: None,
        narrowing_time: None,
        relaxation_time: None,
    }
}

/// Bath couplings held fixed while `Ω_A` is swept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NarrowingSweep {
    pub n_spins: usize,
    pub a_par: f64,
    pub a_perp: f64,
    pub gamma_c: f64,
    pub gamma_n: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub rabi_a: f64,
    pub delta0: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalNarrowing {
    pub scan: Vec<ScanPoint>,
    /// Refined minimum.
    pub best: ScanPoint,
    /// `(4η_3/(πη_1²))^{1/4} √(σ_eq/Δ)`.
    pub analytic_ratio: f64,
    /// `√2 σ_eq (P_0γ_C/(2Rη_3))^{1/4} (Δη_1/σ_eq)^{1/2}` at the optimum.
    pub analytic_delta0: f64,
}

impl OptimalNarrowing {
    /// Scan ratios fall then rise, with no interior local maximum.
    pub fn is_unimodal(&self) -> bool {
        let r: Vec<f64> = self.scan.iter().map(|p| p.ratio).collect();
        let i = r.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map_or(0, |(i, _)| i);
        r[..=i].windows(2).all(|w| w[1] <= w[0]) && r[i..].windows(2).all(|w| w[1] >= w[0])
    }
}

fn evaluate(nv: &NVParams, sweep: &NarrowingSweep, rabi_a: f64) -> Result<ScanPoint> {
    let p = NVParams { rabi_a, ..nv.clone() };
    let params = NarrowingParams::from_nv(sweep.n_spins, sweep.a_par, sweep.a_perp, sweep.gamma_c, sweep.gamma_n, &p)?;
    let d = analytic_distribution(&params)?;
    Ok(ScanPoint { rabi_a, delta0: params.delta0, ratio: d.sigma() / params.sigma_eq() })
}

/// Scans `σ/σ_eq` over the given `Ω_A` values (rad/μs), then refines the
/// minimum by golden section in `ln Ω_A`.
pub fn optimal_narrowing(nv: &NVParams, sweep: &NarrowingSweep, rabi_values: &[f64]) -> Result<OptimalNarrowing> {
    if rabi_values.len() < 3 || rabi_values.windows(2).any(|w| !(w[1] > w[0])) || rabi_values[0] <= 0.0 {
        return Err(BathError::InvalidParams("need at least three increasing positive drive values".into()));
    }
    if nv.strain != 0.0 {
        return Err(BathError::InvalidParams("optimal narrowing formula assumes zero strain".into()));
    }
    let scan: Vec<ScanPoint> = rabi_values.par_iter().map(|&r| evaluate(nv, sweep, r)).collect::<Result<_>>()?;
    let i = scan.iter().enumerate().min_by(|a, b| a.1.ratio.total_cmp(&b.1.ratio)).map_or(0, |(i, _)| i);
    let lo = scan[i.saturating_sub(1)].rabi_a.ln();
    let hi = scan[(i + 1).min(scan.len() - 1)].rabi_a.ln();
    let best = golden_min(lo, hi, |x| evaluate(nv, sweep, x.exp()))?;
    let best = if best.ratio <= scan[i].ratio { best } else { scan[i] };

    let at_best = NVParams { rabi_a: best.rabi_a, ..nv.clone() };
    let a = analytic_steady_state(&at_best)?;
    let params =
        NarrowingParams::from_nv(sweep.n_spins, sweep.a_par, sweep.a_perp, sweep.gamma_c, sweep.gamma_n, &at_best)?;
    let sigma_eq = params.sigma_eq();
    let big_delta = nv.detuning_a2;
    let analytic_ratio =
        (4.0 * a.eta3 / (std::f64::consts::PI * a.eta1 * a.eta1)).powf(0.25) * (sigma_eq / big_delta).sqrt();
    let analytic_delta0 = std::f64::consts::SQRT_2
        * sigma_eq
        * (a.p0 * sweep.gamma_c / (2.0 * params.flip_rate * a.eta3)).powf(0.25)
        * (big_delta * a.eta1 / sigma_eq).sqrt();
    Ok(OptimalNarrowing { scan, best, analytic_ratio, analytic_delta0 })
}

fn golden_min(mut a: f64, mut b: f64, f: impl Fn(f64) -> Result<ScanPoint>) -> Result<ScanPoint> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..40 {
        if fc.ratio < fd.ratio {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
        if (b - a).abs() < 1e-6 {
            break;
        }
    }
    Ok(if fc.ratio < fd.ratio { fc } else { fd })
}
