use hfine_nv::{analytic_steady_state, chi_factors, NVParams};

use crate::error::{BathError, Result};

/// Uniform-bath parameters of the narrowed field distribution. Frequencies
/// in rad/μs, rates in 1/μs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NarrowingParams {
    pub n_spins: usize,
    pub a_par: f64,
    pub a_perp: f64,
    /// Typical flip rate `R` away from the dip.
    pub flip_rate: f64,
    pub gamma_c: f64,
    pub gamma_n: f64,
    pub delta0: f64,
    pub p0: f64,
    pub chi: f64,
}

impl NarrowingParams {
    /// `R`, `δ_0`, `P_0` and `χ` from the NV closed forms.
    pub fn from_nv(n_spins: usize, a_par: f64, a_perp: f64, gamma_c: f64, gamma_n: f64, nv: &NVParams) -> Result<Self> {
        let a = analytic_steady_state(nv)?;
        let chi = chi_factors(nv)?;
        let flip_rate = (chi.excited_sum() + chi.ground) * a_perp * a_perp * a.p0 * (1.0 - 2.0 * a.chi);
        let p = Self { n_spins, a_par, a_perp, flip_rate, gamma_c, gamma_n, delta0: a.delta0, p0: a.p0, chi: a.chi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.a_par, self.a_perp, self.flip_rate, self.gamma_c, self.gamma_n, self.delta0, self.p0, self.chi];
        if vals.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(BathError::InvalidParams("narrowing parameters must be finite and non-negative".into()));
        }
        if self.n_spins == 0 || self.a_par == 0.0 {
            return Err(BathError::InvalidParams("need at least one coupled spin".into()));
        }
        Ok(())
    }

    /// `Γ_dep = γ_C + χR`.
    pub fn gamma_dep(&self) -> f64 {
        self.gamma_c + self.chi * self.flip_rate
    }

    /// `σ_eq = √N A_∥ / 2`.
    pub fn sigma_eq(&self) -> f64 {
        (self.n_spins as f64).sqrt() * self.a_par / 2.0
    }

    /// `δ_s = √(Γ_dep/(R+Γ_dep)) δ_0`.
    pub fn delta_s(&self) -> f64 {
        let g = self.gamma_dep();
        let total = self.flip_rate + g;
        if total == 0.0 {
            return self.delta0;
        }
        (g / total).sqrt() * self.delta0
    }

    /// Per-spin, direction-unbiased flip rate `λ(h) = R h²/(h²+δ_0²) + Γ_dep`.
    pub fn rate_at(&self, h: f64) -> f64 {
        let h2 = h * h;
        let dip = if self.delta0 == 0.0 { 1.0 } else { h2 / (h2 + self.delta0 * self.delta0) };
        self.flip_rate * dip + self.gamma_dep()
    }

    /// Parameters with the given `R/Γ_dep` ratio realized through `γ_C` at `χ = 0`.
    pub fn with_rate_ratio(mut self, ratio: f64) -> Self {
        self.chi = 0.0;
        self.gamma_c = self.flip_rate / ratio;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hfine_lindblad::units::mhz_to_angular;

    #[test]
    fn derived_quantities() {
        let p = NarrowingParams {
            n_spins: 400,
            a_par: mhz_to_angular(0.01),
            a_perp: 0.0,
            flip_rate: 3.0,
            gamma_c: 0.01,
            gamma_n: 0.0,
            delta0: 2.0,
            p0: 0.1,
            chi: 0.01,
        };
        assert!((p.sigma_eq() - 20.0 * std::f64::consts::PI * 0.01).abs() < 1e-12);
        assert!((p.gamma_dep() - 0.04).abs() < 1e-15);
        assert!((p.delta_s() - (0.04f64 / 3.04).sqrt() * 2.0).abs() < 1e-14);
        assert!((p.rate_at(0.0) - 0.04).abs() < 1e-15);
        assert!((p.rate_at(2.0) - 1.54).abs() < 1e-14);
    }

    #[test]
    fn from_nv_defaults() {
        let nv = NVParams::default();
        let p = NarrowingParams::from_nv(400, mhz_to_angular(0.01), mhz_to_angular(0.3), 2.5e-8, 0.0, &nv).unwrap();
        assert!(p.flip_rate > 0.0 && p.delta0 > 0.0 && p.chi > 0.0 && p.chi < 0.5);
        assert!(p.delta_s() < p.delta0);
    }
}
