use std::collections::HashMap;

use hfine_adiabatic::{relaxation_generator, FlipDirection, NuclearConfig, RelaxationGenerator, Transition};

use crate::distribution::FieldDistribution;
use crate::error::{BathError, Result};
use crate::layout::{moved, BathLayout};

/// Largest configuration space solved by explicit enumeration.
pub const ENUMERATION_LIMIT: usize = 200_000;

/// Rate (1/μs) for nucleus `nucleus` to move one step in `direction` out of
/// `from`, whose nuclear field is `field`.
pub trait RateProvider: Sync {
    fn flip_rate(&self, nucleus: usize, direction: FlipDirection, from: &NuclearConfig, field: f64) -> f64;
}

impl<F> RateProvider for F
where
    F: Fn(usize, FlipDirection, &NuclearConfig, f64) -> f64 + Sync,
{
    fn flip_rate(&self, nucleus: usize, direction: FlipDirection, from: &NuclearConfig, field: f64) -> f64 {
        self(nucleus, direction, from, field)
    }
}

/// What to solve for.
#[derive(Debug, Clone, PartialEq)]
pub enum Horizon {
    Steady,
    /// Propagate `initial` for `t` μs.
    Time { initial: Vec<f64>, t: f64 },
}

/// Explicitly enumerated bath master equation `ṗ = G p`.
#[derive(Debug, Clone)]
pub struct ConfigurationMasterEquation {
    layout: BathLayout,
    configs: Vec<NuclearConfig>,
    fields: Vec<f64>,
    index: HashMap<NuclearConfig, usize>,
    generator: RelaxationGenerator,
}

/// Populations over the enumerated configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct Populations {
    pub configs: Vec<NuclearConfig>,
    pub fields: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl Populations {
    /// Marginal over the nuclear field.
    pub fn field_distribution(&self) -> Result<FieldDistribution> {
        let samples = self.fields.iter().copied().zip(self.probabilities.iter().copied()).collect();
        FieldDistribution::from_samples(samples, 1e-9)
    }

    /// Probability that nucleus `k` has projection `twice_m / 2`.
    pub fn marginal(&self, k: usize, twice_m: i32) -> f64 {
        self.configs.iter().zip(&self.probabilities).filter(|(c, _)| c.twice_m()[k] == twice_m).map(|(_, p)| p).sum()
    }
}

impl ConfigurationMasterEquation {
    pub fn new(layout: &BathLayout, provider: &dyn RateProvider) -> Result<Self> {
        let configs = layout.enumerate(ENUMERATION_LIMIT)?;
        let fields: Vec<f64> = configs.iter().map(|c| layout.field(c)).collect();
        let index: HashMap<NuclearConfig, usize> = configs.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let mut transitions = Vec::new();
        for (i, c) in configs.iter().enumerate() {
            for k in 0..layout.n_nuclei() {
                for dir in [FlipDirection::Raise, FlipDirection::Lower] {
                    if !layout.can_flip(c, k, dir) {
                        continue;
                    }
                    let rate = provider.flip_rate(k, dir, c, fields[i]);
                    let to = index[&moved(c, k, dir)];
                    transitions.push(Transition { from: i, to, rate });
                }
            }
        }
        let generator = relaxation_generator(configs.len(), &transitions)?;
        Ok(Self { layout: layout.clone(), configs, fields, index, generator })
    }

    pub fn layout(&self) -> &BathLayout {
        &self.layout
    }

    pub fn configs(&self) -> &[NuclearConfig] {
        &self.configs
    }

    pub fn index_of(&self, config: &NuclearConfig) -> Option<usize> {
        self.index.get(config).copied()
    }

    pub fn generator(&self) -> &RelaxationGenerator {
        &self.generator
    }

    pub fn solve(&self, horizon: &Horizon) -> Result<Populations> {
        let probabilities = match horizon {
            Horizon::Steady => self.generator.stationary()?,
            Horizon::Time { initial, t } => {
                if initial.len() != self.configs.len() {
                    return Err(BathError::InvalidParams("initial populations have the wrong length".into()));
                }
                self.generator.propagate(initial, *t)?
            }
        };
        Ok(Populations { configs: self.configs.clone(), fields: self.fields.clone(), probabilities })
    }

    /// Slowest nonzero relaxation rate of the generator (1/μs).
    pub fn slowest_relaxation_rate(&self) -> Option<f64> {
        self.generator.slowest_relaxation_rate()
    }

    /// Total flip rate out of configuration `i`.
    pub fn total_rate(&self, i: usize) -> f64 {
        self.generator.out_rates()[i]
    }
}

/// Builds and solves in one call.
pub fn configuration_master_equation(
    layout: &BathLayout,
    provider: &dyn RateProvider,
    horizon: &Horizon,
) -> Result<Populations> {
    ConfigurationMasterEquation::new(layout, provider)?.solve(horizon)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nitrogen_chain_sums_to_one() {
        let layout = BathLayout::nitrogen(1.0);
        let rates = |_: usize, _: FlipDirection, _: &NuclearConfig, h: f64| 1.0 + h * h;
        let p = configuration_master_equation(&layout, &rates, &Horizon::Steady).unwrap();
        assert!((p.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // Spin-1 ladder factors are equal, so weights go as 1/λ(h).
        let w = [0.5, 1.0, 0.5];
        for (pi, wi) in p.probabilities.iter().zip(w) {
            assert!((pi - wi / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_rates_give_uniform() {
        let layout = BathLayout::new(vec![1.0, 0.3, 0.2], vec![2, 1, 1]).unwrap();
        let rates = |_: usize, _: FlipDirection, _: &NuclearConfig, _: f64| 0.7;
        let p = configuration_master_equation(&layout, &rates, &Horizon::Steady).unwrap();
        for x in &p.probabilities {
            assert!((x - 1.0 / 12.0).abs() < 1e-12);
        }
    }

    #[test]
    fn propagation_conserves_probability() {
        let layout = BathLayout::uniform_carbons(6, 0.5);
        let rates = |k: usize, _: FlipDirection, _: &NuclearConfig, h: f64| 0.1 + k as f64 * 0.05 + h * h;
        let me = ConfigurationMasterEquation::new(&layout, &rates).unwrap();
        let mut init = vec![0.0; me.configs().len()];
        init[0] = 1.0;
        let p = me.solve(&Horizon::Time { initial: init, t: 3.0 }).unwrap();
        assert!((p.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.probabilities.iter().all(|&x| x > -1e-10));
    }

    #[test]
    fn guard_returns_use_kmc() {
        let layout = BathLayout::uniform_carbons(18, 0.5);
        let rates = |_: usize, _: FlipDirection, _: &NuclearConfig, _: f64| 1.0;
        assert!(matches!(
            ConfigurationMasterEquation::new(&layout, &rates),
            Err(BathError::UseKmc { .. })
        ));
    }
}
