use hfine_adiabatic::{ladder_element, FlipDirection, LongitudinalHfi, NuclearConfig};

use crate::error::{BathError, Result};

/// Longitudinal couplings and spin sizes of the bath, without the electron
/// operator they multiply.
#[derive(Debug, Clone, PartialEq)]
pub struct BathLayout {
    coefficients: Vec<f64>,
    twice_spins: Vec<u32>,
}

/// A bath product state together with its nuclear field.
#[derive(Debug, Clone, PartialEq)]
pub struct BathConfig {
    pub config: NuclearConfig,
    /// `h_m`, rad/μs.
    pub field: f64,
}

impl BathLayout {
    pub fn new(coefficients: Vec<f64>, twice_spins: Vec<u32>) -> Result<Self> {
        if coefficients.len() != twice_spins.len() {
            return Err(BathError::InvalidParams("one spin size per coupling".into()));
        }
        if coefficients.iter().any(|a| !a.is_finite()) || twice_spins.contains(&0) {
            return Err(BathError::InvalidParams("couplings must be finite and spins nonzero".into()));
        }
        Ok(Self { coefficients, twice_spins })
    }

    pub fn from_hfi(hfi: &LongitudinalHfi) -> Self {
        Self { coefficients: hfi.coefficients().to_vec(), twice_spins: hfi.twice_spins().to_vec() }
    }

    /// `n` spin-1/2 nuclei with one coupling `a_par` (rad/μs).
    pub fn uniform_carbons(n: usize, a_par: f64) -> Self {
        Self { coefficients: vec![a_par; n], twice_spins: vec![1; n] }
    }

    /// A single ¹⁴N (spin 1) with ground coupling `a_g` (rad/μs).
    pub fn nitrogen(a_g: f64) -> Self {
        Self { coefficients: vec![a_g], twice_spins: vec![2] }
    }

    pub fn n_nuclei(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn twice_spins(&self) -> &[u32] {
        &self.twice_spins
    }

    pub fn field(&self, config: &NuclearConfig) -> f64 {
        self.coefficients.iter().enumerate().map(|(k, a)| a * config.projection(k)).sum()
    }

    pub fn contains(&self, config: &NuclearConfig) -> bool {
        config.len() == self.n_nuclei()
            && config
                .twice_m()
                .iter()
                .zip(&self.twice_spins)
                .all(|(&m, &s)| m.unsigned_abs() <= s && (m - s as i32) % 2 == 0)
    }

    pub fn bath_config(&self, config: NuclearConfig) -> Result<BathConfig> {
        if !self.contains(&config) {
            return Err(BathError::InvalidParams(format!("configuration {config} outside the spin ranges")));
        }
        let field = self.field(&config);
        Ok(BathConfig { config, field })
    }

    /// Number of product configurations, as a float so huge baths do not overflow.
    pub fn config_count(&self) -> f64 {
        self.twice_spins.iter().map(|&s| (s + 1) as f64).product()
    }

    /// Whether nucleus `k` in `config` can move in `dir`.
    pub fn can_flip(&self, config: &NuclearConfig, k: usize, dir: FlipDirection) -> bool {
        ladder_element(self.twice_spins[k], config.twice_m()[k], dir) != 0.0
    }

    /// Field change when nucleus `k` moves in `dir`.
    pub fn field_step(&self, k: usize, dir: FlipDirection) -> f64 {
        self.coefficients[k] * dir.step() as f64 * 0.5
    }

    pub fn enumerate(&self, limit: usize) -> Result<Vec<NuclearConfig>> {
        let count = self.config_count();
        if count > limit as f64 {
            return Err(BathError::UseKmc { count, limit });
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut cur: Vec<i32> = self.twice_spins.iter().map(|&s| -(s as i32)).collect();
        loop {
            out.push(NuclearConfig::from_twice(cur.clone()));
            let mut k = 0;
            loop {
                if k == cur.len() {
                    return Ok(out);
                }
                if cur[k] < self.twice_spins[k] as i32 {
                    cur[k] += 2;
                    break;
                }
                cur[k] = -(self.twice_spins[k] as i32);
                k += 1;
            }
        }
    }
}

pub(crate) fn moved(config: &NuclearConfig, k: usize, dir: FlipDirection) -> NuclearConfig {
    let mut m = config.twice_m().to_vec();
    m[k] += dir.step();
    NuclearConfig::from_twice(m)
}
