use hfine_lindblad::Complex64;

use crate::error::Result;
use crate::hfi::NuclearConfig;
use crate::system::AdiabaticSystem;

/// First-order nuclear dynamics: the diagonal generator `H_eff(m) = h_m ⟨O⟩_{m,m}`.
pub struct MeanField<'a> {
    system: &'a AdiabaticSystem,
}

impl<'a> MeanField<'a> {
    pub fn new(system: &'a AdiabaticSystem) -> Self {
        Self { system }
    }

    /// `h ⟨O⟩_h` for a bare field value.
    pub fn energy_at_field(&self, field: f64) -> Result<f64> {
        if field == 0.0 {
            return Ok(0.0);
        }
        Ok(field * self.system.mean_operator(field)?)
    }

    pub fn energy(&self, config: &NuclearConfig) -> Result<f64> {
        self.system.hfi().validate(config)?;
        self.energy_at_field(self.system.field(config))
    }

    /// First-order rate of change of `p^(m,n)` per unit `p^(m,n)`.
    pub fn coherence_rate(&self, m: &NuclearConfig, n: &NuclearConfig) -> Result<Complex64> {
        Ok(Complex64::new(0.0, -(self.energy(m)? - self.energy(n)?)))
    }
}

/// `H_eff` over a grid of field values.
pub fn mean_field_generator(system: &AdiabaticSystem, fields: &[f64]) -> Result<Vec<f64>> {
    system.prefill(fields)?;
    let mf = MeanField::new(system);
    fields.iter().map(|&h| mf.energy_at_field(h)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hfi::LongitudinalHfi;
    use crate::testutil::driven_spin;

    #[test]
    fn zero_field_has_zero_energy() {
        let (model, sz) = driven_spin(1.0, 1.0);
        let sys = AdiabaticSystem::new(model, LongitudinalHfi::new(sz, vec![1.0], vec![1]).unwrap()).unwrap();
        assert_eq!(MeanField::new(&sys).energy_at_field(0.0).unwrap(), 0.0);
    }

    #[test]
    fn undriven_mean_field_is_linear() {
        // Decay only: the electron sits in |dn⟩ for every field, ⟨S_z⟩ = -1/2.
        let (model, sz) = driven_spin(0.0, 1.0);
        let sys = AdiabaticSystem::new(model, LongitudinalHfi::new(sz, vec![1.0], vec![1]).unwrap()).unwrap();
        let fields = [-2.0, -1.0, 0.5, 3.0];
        let e = mean_field_generator(&sys, &fields).unwrap();
        for (h, v) in fields.iter().zip(e) {
            assert!((v + 0.5 * h).abs() < 1e-12);
        }
    }

    #[test]
    fn driven_mean_field_is_nonlinear() {
        let (model, sz) = driven_spin(2.0, 1.0);
        let sys = AdiabaticSystem::new(model, LongitudinalHfi::new(sz, vec![1.0], vec![1]).unwrap()).unwrap();
        let step = 0.05;
        let fields: Vec<f64> = (0..41).map(|i| -1.0 + step * i as f64).collect();
        let e = mean_field_generator(&sys, &fields).unwrap();
        let curv: Vec<f64> = e.windows(3).map(|w| (w[0] - 2.0 * w[1] + w[2]) / (step * step)).collect();
        assert!(curv.iter().any(|c| c.abs() > 1e-2));
    }

    #[test]
    fn coherence_rate_from_energies() {
        let (model, sz) = driven_spin(1.5, 1.0);
        let sys = AdiabaticSystem::new(model, LongitudinalHfi::new(sz, vec![2.0], vec![1]).unwrap()).unwrap();
        let up = NuclearConfig::from_twice(vec![1]);
        let dn = NuclearConfig::from_twice(vec![-1]);
        let mf = MeanField::new(&sys);
        let r = mf.coherence_rate(&up, &dn).unwrap();
        assert_eq!(r.re, 0.0);
        assert!((r.im + (mf.energy(&up).unwrap() - mf.energy(&dn).unwrap())).abs() < 1e-15);
    }
}
