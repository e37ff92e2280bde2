use crate::error::{NvError, Result};
use crate::params::NVParams;

/// Closed-form CPT steady state near the two-photon dark resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSteadyState {
    /// Plateau of the `E_y` population away from resonance.
    pub p0: f64,
    /// Half width of the dip, rad/μs.
    pub delta0: f64,
    /// `γ_ce / γ_s1`.
    pub eta1: f64,
    /// `γ_s / (γ_s + γ_ce)`.
    pub eta2: f64,
    /// `Γ_{A1} Γ_{A2} / (γ + γ_s1)²`.
    pub eta3: f64,
    /// Relative off-resonant depolarization.
    pub chi: f64,
    /// Optical pumping rate into `A_1`.
    pub w_a: f64,
    /// Optical pumping rate into `E_y`.
    pub w_e: f64,
    /// Off-resonant pumping rate into `A_2`.
    pub w_a2: f64,
    gamma: f64,
    gamma_s1: f64,
    gamma_s2: f64,
    gamma_ce: f64,
    gamma_s: f64,
}

/// Predicted populations at one two-photon detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedPopulations {
    pub ey: f64,
    pub zero: f64,
    pub dark: f64,
    pub singlet: f64,
    pub a1: f64,
    pub a2: f64,
}

impl AnalyticSteadyState {
    /// Requires zero strain; the strained width formula is not used.
    pub fn new(p: &NVParams) -> Result<Self> {
        p.validate()?;
        if p.strain != 0.0 {
            return Err(NvError::InvalidParams("analytic steady state needs zero strain".into()));
        }
        if p.gamma_s1 <= 0.0 || p.gamma_ce <= 0.0 || p.rabi_a == 0.0 || p.rabi_e == 0.0 {
            return Err(NvError::InvalidParams(
                "analytic steady state needs gamma_s1, gamma_ce and both drives nonzero".into(),
            ));
        }
        let g = p.gamma;
        let eta1 = p.gamma_ce / p.gamma_s1;
        let eta2 = p.gamma_s / (p.gamma_s + p.gamma_ce);
        let eta3 = p.width_a1() * p.width_a2() / (g + p.gamma_s1).powi(2);
        let w_a = p.rabi_a.powi(2) / p.width_a1();
        let w_e = p.rabi_e.powi(2) / p.width_ey();
        let w_a2 = if p.drive_a2 { 0.5 * p.rabi_a.powi(2) * p.width_a2() / p.detuning_a2.powi(2) } else { 0.0 };
        let leak = (g + 2.0 * p.gamma_ce) / w_e;
        let p0 = 1.0 / (2.0 / eta2 + 2.0 * eta1 * (g + p.gamma_s1) / w_a + leak);
        let delta0_sq =
            0.25 * eta1 * eta2 * w_a * w_a / (eta1 * eta2 + w_a / (g + p.gamma_s1) * (1.0 + 0.5 * eta2 * leak));
        let chi = (g + p.gamma_phi) * p.rabi_a.powi(2) / (4.0 * eta1 * p.detuning_a2.powi(2) * (g + p.gamma_s1));
        Ok(Self {
            p0,
            delta0: delta0_sq.sqrt(),
            eta1,
            eta2,
            eta3,
            chi,
            w_a,
            w_e,
            w_a2,
            gamma: g,
            gamma_s1: p.gamma_s1,
            gamma_s2: p.gamma_s2,
            gamma_ce: p.gamma_ce,
            gamma_s: p.gamma_s,
        })
    }

    /// Lorentzian dip `P_0 δ²/(δ² + δ_0²)` without the off-resonant term.
    pub fn dip(&self, delta_m: f64) -> f64 {
        let d2 = delta_m * delta_m;
        self.p0 * d2 / (d2 + self.delta0 * self.delta0)
    }

    /// Zeroth order plus the leading off-resonant correction.
    pub fn populations(&self, delta_m: f64) -> PredictedPopulations {
        let ey0 = self.dip(delta_m);
        let leak = (self.gamma + 2.0 * self.gamma_ce) / self.w_e;
        let dark0 = 1.0 - (2.0 + leak) * ey0;
        let pump = self.w_a2 * dark0;
        let ey = ey0 + pump / (2.0 * self.eta1 * (self.gamma + self.gamma_s1));
        let a1 = 2.0 * self.eta1 * ey0 + pump / (self.gamma + self.gamma_s1);
        let a2 = pump / (self.gamma + self.gamma_s2);
        PredictedPopulations {
            ey,
            zero: (1.0 + leak) * ey,
            dark: dark0,
            singlet: 2.0 * self.gamma_ce / self.gamma_s * ey,
            a1,
            a2,
        }
    }
}

pub fn analytic_steady_state(params: &NVParams) -> Result<AnalyticSteadyState> {
    AnalyticSteadyState::new(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dark_resonance_without_leak() {
        let p = NVParams { drive_a2: false, ..NVParams::default() };
        let a = analytic_steady_state(&p).unwrap();
        assert_eq!(a.populations(0.0).ey, 0.0);
        let far = a.populations(1e4 * a.delta0).ey;
        assert!((far - a.p0).abs() < 1e-6 * a.p0);
    }

    #[test]
    fn ratios_by_hand() {
        let p = NVParams::default();
        let a = analytic_steady_state(&p).unwrap();
        assert!((a.eta1 - 1.0 / 800.0).abs() < 1e-15);
        let gs = 1000.0 / 300.0;
        let gce = 1000.0 / 12.0 / 800.0;
        assert!((a.eta2 - gs / (gs + gce)).abs() < 1e-14);
        // Doubling the detuning quarters chi and the A2 pumping.
        let b = analytic_steady_state(&p.clone().with_detuning_a2(2.0 * p.detuning_a2)).unwrap();
        assert!((a.chi / b.chi - 4.0).abs() < 1e-12);
        assert!((a.w_a2 / b.w_a2 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn strain_is_rejected() {
        let p = NVParams { strain: 0.1, ..NVParams::default() };
        assert!(analytic_steady_state(&p).is_err());
    }
}

/// Least-squares fit of `p0 δ²/(δ² + δ0²) + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipFit {
    pub p0: f64,
    pub delta0: f64,
    pub offset: f64,
    /// Largest absolute residual.
    pub max_residual: f64,
}

/// Fits the CPT dip shape; `delta0` is searched on a log scale between the
/// smallest nonzero and the largest `|δ|` of the grid.
pub fn fit_cpt_dip(deltas: &[f64], values: &[f64]) -> Option<DipFit> {
    if deltas.len() != values.len() || deltas.len() < 3 {
        return None;
    }
    let abs: Vec<f64> = deltas.iter().map(|d| d.abs()).filter(|d| *d > 0.0).collect();
    let lo = abs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = abs.iter().cloned().fold(0.0, f64::max);
    if !(lo < hi) {
        return None;
    }
    let linear = |d0: f64| -> (f64, f64, f64) {
        // Least squares in (p0, offset) for fixed d0.
        let (mut sxx, mut sx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        let n = deltas.len() as f64;
        for (&d, &y) in deltas.iter().zip(values) {
            let x = d * d / (d * d + d0 * d0);
            sxx += x * x;
            sx += x;
            sy += y;
            sxy += x * y;
        }
        let det = n * sxx - sx * sx;
        let p0 = (n * sxy - sx * sy) / det;
        let offset = (sy - p0 * sx) / n;
        let sse: f64 = deltas
            .iter()
            .zip(values)
            .map(|(&d, &y)| (p0 * d * d / (d * d + d0 * d0) + offset - y).powi(2))
            .sum();
        (p0, offset, sse)
    };
    // Coarse log scan, then golden-section refinement.
    let (a, b) = (lo.ln() - 1.0, hi.ln() + 1.0);
    let steps = 200;
    let mut best = (a, f64::INFINITY);
    for i in 0..=steps {
        let t = a + (b - a) * i as f64 / steps as f64;
        let sse = linear(t.exp()).2;
        if sse < best.1 {
            best = (t, sse);
        }
    }
    let h = (b - a) / steps as f64;
    let (mut l, mut r) = (best.0 - h, best.0 + h);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let m1 = r - phi * (r - l);
        let m2 = l + phi * (r - l);
        if linear(m1.exp()).2 < linear(m2.exp()).2 {
            r = m2;
        } else {
            l = m1;
        }
    }
    let d0 = (0.5 * (l + r)).exp();
    let (p0, offset, _) = linear(d0);
    let max_residual = deltas
        .iter()
        .zip(values)
        .map(|(&d, &y)| (p0 * d * d / (d * d + d0 * d0) + offset - y).abs())
        .fold(0.0, f64::max);
    Some(DipFit { p0, delta0: d0, offset, max_residual })
}

#[cfg(test)]
mod fit_tests {
    use super::*;

    #[test]
    fn recovers_synthetic_dip() {
        let deltas: Vec<f64> = (-50..=50).map(|i| i as f64 * 0.1).collect();
        let values: Vec<f64> = deltas.iter().map(|d| 0.3 * d * d / (d * d + 0.49) + 0.01).collect();
        let fit = fit_cpt_dip(&deltas, &values).unwrap();
        assert!((fit.p0 - 0.3).abs() < 1e-9);
        assert!((fit.delta0 - 0.7).abs() < 1e-8);
        assert!((fit.offset - 0.01).abs() < 1e-9);
    }
}
