use crate::distribution::FieldDistribution;
use crate::error::{BathError, Result};
use crate::params::NarrowingParams;

/// Birth–death chain on the total projection `M` of `n` spin-1/2 nuclei
/// with field `h_M = a_par·M` and per-spin flip rate `λ(h_M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BirthDeathChain {
    n: usize,
    a_par: f64,
    rates: Vec<f64>,
}

impl BirthDeathChain {
    pub fn new(n: usize, a_par: f64, rate: impl Fn(f64) -> f64) -> Result<Self> {
        if n == 0 || !a_par.is_finite() || a_par <= 0.0 {
            return Err(BathError::InvalidParams("birth-death chain needs n > 0 and a positive coupling".into()));
        }
        let mut rates = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let field = a_par * projection(n, k);
            let r = rate(field);
            if !r.is_finite() || r < 0.0 {
                return Err(BathError::BadRate { field, rate: r });
            }
            rates.push(r);
        }
        Ok(Self { n, a_par, rates })
    }

    pub fn n_states(&self) -> usize {
        self.n + 1
    }

    /// Field of the state with `k` spins up.
    pub fn field(&self, k: usize) -> f64 {
        self.a_par * projection(self.n, k)
    }

    /// `W_{M→M+1} = λ(h_M) n_↓`.
    pub fn up_rate(&self, k: usize) -> f64 {
        self.rates[k] * (self.n - k) as f64
    }

    /// `W_{M→M−1} = λ(h_M) n_↑`.
    pub fn down_rate(&self, k: usize) -> f64 {
        self.rates[k] * k as f64
    }

    /// `p(M) ∝ binom(N, k)/λ(h_M)`. States with zero rate absorb all the mass.
    pub fn steady_weights(&self) -> Vec<f64> {
        if self.rates.contains(&0.0) {
            return self.rates.iter().map(|&r| if r == 0.0 { 1.0 } else { 0.0 }).collect();
        }
        let mut ln_binom = 0.0;
        let log_w: Vec<f64> = (0..=self.n)
            .map(|k| {
                if k > 0 {
                    ln_binom += ((self.n - k + 1) as f64).ln() - (k as f64).ln();
                }
                ln_binom - self.rates[k].ln()
            })
            .collect();
        let max = log_w.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let w: Vec<f64> = log_w.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    }

    pub fn steady(&self) -> Result<FieldDistribution> {
        let h = (0..=self.n).map(|k| self.field(k)).collect();
        FieldDistribution::new(h, self.steady_weights())
    }
}

fn projection(n: usize, k: usize) -> f64 {
    k as f64 - n as f64 / 2.0
}


/// Exact steady state of the uniform bath under `λ(h) = R h²/(h²+δ_0²) + Γ_dep`.
pub fn birth_death_steady(params: &NarrowingParams) -> Result<FieldDistribution> {
    params.validate()?;
    BirthDeathChain::new(params.n_spins, params.a_par, |h| params.rate_at(h))?.steady()
}

/// Same chain with an arbitrary direction-unbiased per-spin rate profile.
pub fn birth_death_with_rate(n: usize, a_par: f64, rate: impl Fn(f64) -> f64) -> Result<FieldDistribution> {
    BirthDeathChain::new(n, a_par, rate)?.steady()
}
