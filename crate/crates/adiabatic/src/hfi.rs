use std::fmt;

use hfine_lindblad::{Complex64, Operator};

use crate::error::{AdiabaticError, Result};

/// Product state of the nuclear spins, stored as twice the projections so
/// that spin-1/2 and spin-1 share one integer type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NuclearConfig {
    twice_m: Vec<i32>,
}

impl NuclearConfig {
    pub fn from_twice(twice_m: Vec<i32>) -> Self {
        Self { twice_m }
    }

    pub fn twice_m(&self) -> &[i32] {
        &self.twice_m
    }

    pub fn len(&self) -> usize {
        self.twice_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.twice_m.is_empty()
    }

    pub fn projection(&self, k: usize) -> f64 {
        0.5 * self.twice_m[k] as f64
    }

    fn with_step(&self, k: usize, step: i32) -> Self {
        let mut twice_m = self.twice_m.clone();
        twice_m[k] += step;
        Self { twice_m }
    }
}

impl fmt::Display for NuclearConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, m) in self.twice_m.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if m % 2 == 0 {
                write!(f, "{}", m / 2)?;
            } else {
                write!(f, "{m}/2")?;
            }
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlipDirection {
    Raise,
    Lower,
}

impl FlipDirection {
    pub fn step(self) -> i32 {
        match self {
            FlipDirection::Raise => 2,
            FlipDirection::Lower => -2,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            FlipDirection::Raise => FlipDirection::Lower,
            FlipDirection::Lower => FlipDirection::Raise,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FlipDirection::Raise => "raise",
            FlipDirection::Lower => "lower",
        }
    }
}

/// `⟨m ± 1|I_±|m⟩` for a spin of size `twice_spin / 2`; zero at the edges.
pub fn ladder_element(twice_spin: u32, twice_m: i32, dir: FlipDirection) -> f64 {
    let s = twice_spin as f64 / 2.0;
    let m = twice_m as f64 / 2.0;
    let target = twice_m + dir.step();
    if target.unsigned_abs() > twice_spin {
        return 0.0;
    }
    let v = match dir {
        FlipDirection::Raise => s * (s + 1.0) - m * (m + 1.0),
        FlipDirection::Lower => s * (s + 1.0) - m * (m - 1.0),
    };
    v.max(0.0).sqrt()
}

/// Longitudinal coupling `K_m = O · h_m` with `h_m = Σ_k a_k m_k`.
#[derive(Debug, Clone)]
pub struct LongitudinalHfi {
    electron_operator: Operator,
    coefficients: Vec<f64>,
    twice_spins: Vec<u32>,
}

impl LongitudinalHfi {
    /// `coefficients[k]` in rad/μs per unit projection of nucleus `k`,
    /// whose spin is `twice_spins[k] / 2`.
    pub fn new(electron_operator: Operator, coefficients: Vec<f64>, twice_spins: Vec<u32>) -> Result<Self> {
        electron_operator.check_hermitian()?;
        if coefficients.len() != twice_spins.len() {
            return Err(AdiabaticError::InvalidHfi(format!(
                "{} coefficients for {} nuclei",
                coefficients.len(),
                twice_spins.len()
            )));
        }
        if coefficients.iter().any(|a| !a.is_finite()) {
            return Err(AdiabaticError::InvalidHfi("non-finite coefficient".into()));
        }
        if twice_spins.iter().any(|&s| s == 0) {
            return Err(AdiabaticError::InvalidHfi("spin-0 nucleus".into()));
        }
        Ok(Self { electron_operator, coefficients, twice_spins })
    }

    pub fn electron_operator(&self) -> &Operator {
        &self.electron_operator
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn twice_spins(&self) -> &[u32] {
        &self.twice_spins
    }

    pub fn n_nuclei(&self) -> usize {
        self.coefficients.len()
    }

    pub fn validate(&self, config: &NuclearConfig) -> Result<()> {
        let ok = config.len() == self.n_nuclei()
            && config
                .twice_m()
                .iter()
                .zip(&self.twice_spins)
                .all(|(&m, &s)| m.unsigned_abs() <= s && (m - s as i32) % 2 == 0);
        if ok {
            Ok(())
        } else {
            Err(AdiabaticError::InvalidConfig(config.to_string()))
        }
    }

    /// `h_m` in rad/μs.
    pub fn field(&self, config: &NuclearConfig) -> f64 {
        self.coefficients.iter().enumerate().map(|(k, a)| a * config.projection(k)).sum()
    }

    /// `O · h`.
    pub fn k_operator(&self, field: f64) -> Operator {
        self.electron_operator.scale_re(field)
    }

    /// Every product configuration; `None` when more than `limit`.
    pub fn enumerate_configs(&self, limit: usize) -> Option<Vec<NuclearConfig>> {
        let mut count: usize = 1;
        for &s in &self.twice_spins {
            count = count.checked_mul(s as usize + 1)?;
            if count > limit {
                return None;
            }
        }
        let mut out = Vec::with_capacity(count);
        let mut cur: Vec<i32> = self.twice_spins.iter().map(|&s| -(s as i32)).collect();
        loop {
            out.push(NuclearConfig::from_twice(cur.clone()));
            let mut k = 0;
            loop {
                if k == cur.len() {
                    return Some(out);
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

/// One nuclear-flip coupling: `V^(p,m) = ⟨p|I_±|m⟩ · A` oscillating at
/// `ω_{p,m}`, where `p` is `m` with nucleus `nucleus` moved one step in
/// `direction`.
#[derive(Debug, Clone)]
pub struct TransverseBlock {
    pub nucleus: usize,
    pub direction: FlipDirection,
    pub electron_operator: Operator,
    /// `ω_{p,m}` in rad/μs.
    pub frequency: f64,
    /// Free-form tag naming the electron transition.
    pub label: String,
}

impl TransverseBlock {
    /// The reverse block: daggered operator, negated frequency.
    pub fn paired(&self) -> Self {
        Self {
            nucleus: self.nucleus,
            direction: self.direction.reversed(),
            electron_operator: self.electron_operator.dagger(),
            frequency: -self.frequency,
            label: self.label.clone(),
        }
    }

    /// Target configuration, or `None` when the flip leaves the spin range.
    pub fn target(&self, hfi: &LongitudinalHfi, from: &NuclearConfig) -> Option<NuclearConfig> {
        let s = *hfi.twice_spins().get(self.nucleus)?;
        let m = *from.twice_m().get(self.nucleus)?;
        let t = m + self.direction.step();
        (t.unsigned_abs() <= s).then(|| from.with_step(self.nucleus, self.direction.step()))
    }

    /// `V^(p,m)` including the nuclear ladder element.
    pub fn coupling(&self, hfi: &LongitudinalHfi, from: &NuclearConfig) -> Result<Operator> {
        let s = hfi
            .twice_spins()
            .get(self.nucleus)
            .ok_or(AdiabaticError::IndexOutOfRange(self.nucleus))?;
        let lad = ladder_element(*s, from.twice_m()[self.nucleus], self.direction);
        Ok(self.electron_operator.scale(Complex64::new(lad, 0.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hfine_lindblad::ElectronBasis;

    fn sz() -> Operator {
        let b = ElectronBasis::new(["dn", "up"]).unwrap();
        let mut o = Operator::zeros(&b);
        o.set(0, 0, Complex64::new(-0.5, 0.0));
        o.set(1, 1, Complex64::new(0.5, 0.0));
        o
    }

    #[test]
    fn ladder_elements() {
        assert_eq!(ladder_element(1, -1, FlipDirection::Raise), 1.0);
        assert_eq!(ladder_element(1, 1, FlipDirection::Raise), 0.0);
        assert!((ladder_element(2, 0, FlipDirection::Raise) - 2f64.sqrt()).abs() < 1e-15);
        assert!((ladder_element(2, 0, FlipDirection::Lower) - 2f64.sqrt()).abs() < 1e-15);
        assert!((ladder_element(2, 2, FlipDirection::Lower) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(ladder_element(2, -2, FlipDirection::Lower), 0.0);
    }

    #[test]
    fn field_and_enumeration() {
        let hfi = LongitudinalHfi::new(sz(), vec![2.0, 0.5, 0.5], vec![2, 1, 1]).unwrap();
        let configs = hfi.enumerate_configs(100).unwrap();
        assert_eq!(configs.len(), 12);
        let c = NuclearConfig::from_twice(vec![2, -1, 1]);
        assert!(hfi.validate(&c).is_ok());
        assert_eq!(hfi.field(&c), 2.0);
        assert!(hfi.validate(&NuclearConfig::from_twice(vec![1, 1, 1])).is_err());
        assert!(hfi.validate(&NuclearConfig::from_twice(vec![4, 1, 1])).is_err());
        assert!(hfi.enumerate_configs(11).is_none());
        assert_eq!(c.to_string(), "[1 -1/2 1/2]");
    }

    #[test]
    fn pairing_and_targets() {
        let hfi = LongitudinalHfi::new(sz(), vec![1.0], vec![1]).unwrap();
        let b = sz().basis().clone();
        let block = TransverseBlock {
            nucleus: 0,
            direction: FlipDirection::Raise,
            electron_operator: Operator::transition(&b, 0, 1),
            frequency: 3.0,
            label: "test".into(),
        };
        let p = block.paired();
        assert_eq!(p.frequency, -3.0);
        assert_eq!(p.electron_operator, Operator::transition(&b, 1, 0));
        let down = NuclearConfig::from_twice(vec![-1]);
        let up = block.target(&hfi, &down).unwrap();
        assert_eq!(up.twice_m(), &[1]);
        assert!(block.target(&hfi, &up).is_none());
        assert_eq!(p.target(&hfi, &up), Some(down));
    }
}
