use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use hfine_lindblad::{build_liouvillian, steady_state, DensityMatrix, ElectronModel, Operator, Superoperator};
use rayon::prelude::*;

use crate::error::{at_field, Result};
use crate::hfi::{LongitudinalHfi, NuclearConfig};

/// Resolution of the steady-state cache key, rad/μs.
pub const FIELD_QUANTUM: f64 = 1e-9;

fn key(field: f64) -> i64 {
    (field / FIELD_QUANTUM).round() as i64
}

/// Electron steady states `P_{m,n}` keyed by the mean nuclear field
/// `(h_m + h_n)/2`. Entries are solved exactly on first request.
#[derive(Debug, Default)]
pub struct SteadyStateMap {
    cache: RwLock<HashMap<i64, Arc<DensityMatrix>>>,
}

impl SteadyStateMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, field: f64) -> Option<Arc<DensityMatrix>> {
        self.cache.read().expect("cache lock").get(&key(field)).cloned()
    }

    fn insert(&self, field: f64, p: Arc<DensityMatrix>) -> Arc<DensityMatrix> {
        self.cache.write().expect("cache lock").entry(key(field)).or_insert(p).clone()
    }
}

/// An electron model coupled longitudinally to a set of nuclei.
#[derive(Debug)]
pub struct AdiabaticSystem {
    model: ElectronModel,
    hfi: LongitudinalHfi,
    steady: SteadyStateMap,
}

impl AdiabaticSystem {
    pub fn new(model: ElectronModel, hfi: LongitudinalHfi) -> Result<Self> {
        hfi.electron_operator().ensure_basis(model.basis())?;
        Ok(Self { model, hfi, steady: SteadyStateMap::new() })
    }

    pub fn model(&self) -> &ElectronModel {
        &self.model
    }

    pub fn hfi(&self) -> &LongitudinalHfi {
        &self.hfi
    }

    pub fn steady_map(&self) -> &SteadyStateMap {
        &self.steady
    }

    pub fn field(&self, config: &NuclearConfig) -> f64 {
        self.hfi.field(config)
    }

    /// `L` with `O · field` added to the Hamiltonian.
    pub fn liouvillian(&self, field: f64) -> Result<Superoperator> {
        let k = self.hfi.k_operator(field);
        build_liouvillian(&self.model, Some(&k)).map_err(at_field(field))
    }

    /// Model whose Hamiltonian already contains `O · field`.
    pub fn shifted_model(&self, field: f64) -> Result<ElectronModel> {
        let h = self.model.hamiltonian() + &self.hfi.k_operator(field);
        self.model.with_hamiltonian(h).map_err(at_field(field))
    }

    /// Steady state at mean field `field`, cached.
    pub fn steady_state(&self, field: f64) -> Result<Arc<DensityMatrix>> {
        if let Some(p) = self.steady.get(field) {
            return Ok(p);
        }
        let l = self.liouvillian(field)?;
        let p = steady_state(&l).map_err(at_field(field))?;
        Ok(self.steady.insert(field, Arc::new(p)))
    }

    /// `P_{m,n}`.
    pub fn pair_steady_state(&self, m: &NuclearConfig, n: &NuclearConfig) -> Result<Arc<DensityMatrix>> {
        self.steady_state(0.5 * (self.field(m) + self.field(n)))
    }

    /// Solves every requested field in parallel.
    pub fn prefill(&self, fields: &[f64]) -> Result<()> {
        fields.par_iter().try_for_each(|&h| self.steady_state(h).map(|_| ()))
    }

    /// `⟨O⟩` in the steady state at `field`.
    pub fn mean_operator(&self, field: f64) -> Result<f64> {
        let p = self.steady_state(field)?;
        Ok(self.hfi.electron_operator().expectation(&p).re)
    }

    /// `Tr(X P)` for the steady state at `field`.
    pub fn expectation(&self, op: &Operator, field: f64) -> Result<hfine_lindblad::Complex64> {
        let p = self.steady_state(field)?;
        Ok(op.expectation(&p))
    }
}

/// Steady states for every field in `fields`, solved in parallel.
pub fn electron_steady_map(
    model: &ElectronModel,
    hfi: &LongitudinalHfi,
    fields: &[f64],
) -> Result<AdiabaticSystem> {
    let sys = AdiabaticSystem::new(model.clone(), hfi.clone())?;
    sys.prefill(fields)?;
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::driven_spin;
    use hfine_lindblad::Complex64;

    #[test]
    fn zero_coupling_gives_identical_states() {
        let (model, sz) = driven_spin(1.0, 1.0);
        let hfi = LongitudinalHfi::new(sz, vec![0.0, 0.0], vec![1, 1]).unwrap();
        let sys = AdiabaticSystem::new(model, hfi).unwrap();
        let configs = sys.hfi().enumerate_configs(16).unwrap();
        let first = sys.pair_steady_state(&configs[0], &configs[0]).unwrap();
        for m in &configs {
            for n in &configs {
                assert_eq!(*sys.pair_steady_state(m, n).unwrap(), *first);
            }
        }
        assert_eq!(sys.steady_map().len(), 1);
    }

    #[test]
    fn detuned_drive_lorentzian_against_ode_oracle() {
        let (rabi, gamma) = (1.0, 2.0);
        let (model, sz) = driven_spin(rabi, gamma);
        let hfi = LongitudinalHfi::new(sz, vec![1.0], vec![1]).unwrap();
        let sys = AdiabaticSystem::new(model, hfi).unwrap();
        for h in [-3.0, -1.0, 0.0, 0.5, 2.0] {
            let p = sys.steady_state(h).unwrap();
            // RK4 oracle on the vectorized equation, integrated to 60/γ.
            let l = sys.liouvillian(h).unwrap();
            let m = l.matrix();
            let mut y = nalgebra::DVector::from_column_slice(Operator::projector(l.basis(), 0).matrix().as_slice());
            let steps = 12_000;
            let dt = Complex64::new(60.0 / gamma / steps as f64, 0.0);
            for _ in 0..steps {
                let k1 = m * &y;
                let k2 = m * (&y + &k1 * (dt * 0.5));
                let k3 = m * (&y + &k2 * (dt * 0.5));
                let k4 = m * (&y + &k3 * dt);
                y += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4) * (dt / 6.0);
            }
            assert!((p.population(1) - y[3].re).abs() < 1e-6, "h = {h}");
        }
    }

    #[test]
    fn prefill_is_order_independent() {
        let (model, sz) = driven_spin(1.3, 0.7);
        let hfi = LongitudinalHfi::new(sz, vec![1.0], vec![1]).unwrap();
        let fields: Vec<f64> = (0..16).map(|i| 0.1 * i as f64 - 0.8).collect();
        let a = electron_steady_map(&model, &hfi, &fields).unwrap();
        let mut rev = fields.clone();
        rev.reverse();
        let b = electron_steady_map(&model, &hfi, &rev).unwrap();
        for h in fields {
            assert_eq!(*a.steady_state(h).unwrap(), *b.steady_state(h).unwrap());
        }
    }
}
