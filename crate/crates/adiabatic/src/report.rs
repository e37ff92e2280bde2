use crate::error::Result;
use crate::hfi::{NuclearConfig, TransverseBlock};
use crate::system::AdiabaticSystem;

/// Separation demanded between the electron and nuclear time scales.
pub const SEPARATION_THRESHOLD: f64 = 0.1;

/// The four time scales of the adiabatic treatment, all in μs.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    /// Electron damping time `1 / min |Re λ|` over nonzero eigenvalues.
    pub t_e: f64,
    /// Mean-field precession time `1 / max |⟨K_m - K_n⟩|`.
    pub t_coh: f64,
    /// Dephasing time `1 / max Γ^φ`.
    pub t_2: f64,
    /// Relaxation time `1 / max W`.
    pub t_1: f64,
}

impl ValidityReport {
    /// `(T_coh, T_1, T_2) / T_e`.
    pub fn separation_ratios(&self) -> [f64; 3] {
        [self.t_coh / self.t_e, self.t_1 / self.t_e, self.t_2 / self.t_e]
    }

    /// True when `T_e / min(T_coh, T_1, T_2)` exceeds the threshold.
    pub fn violated(&self) -> bool {
        let slowest_nuclear = self.t_coh.min(self.t_1).min(self.t_2);
        self.t_e / slowest_nuclear > SEPARATION_THRESHOLD
    }
}

fn inverse(rate: f64) -> f64 {
    if rate > 0.0 { 1.0 / rate } else { f64::INFINITY }
}

/// Time scales over the sample configurations, flip rates by the exact method.
pub fn timescale_report(
    system: &AdiabaticSystem,
    blocks: &[TransverseBlock],
    samples: &[NuclearConfig],
) -> Result<ValidityReport> {
    let mut slowest_electron = f64::INFINITY;
    for m in samples {
        let l = system.liouvillian(system.field(m))?;
        let floor = 1e-9 * l.norm();
        for z in l.eigenvalues()? {
            let r = z.re.abs();
            if r > floor {
                slowest_electron = slowest_electron.min(r);
            }
        }
    }
    let mut max_k = 0.0f64;
    let mut max_phi = 0.0f64;
    for (i, m) in samples.iter().enumerate() {
        for n in &samples[i + 1..] {
            let (hm, hn) = (system.field(m), system.field(n));
            let k = system.hfi().k_operator(hm - hn);
            let p = system.pair_steady_state(m, n)?;
            max_k = max_k.max(k.expectation(&p).norm());
            max_phi = max_phi.max(system.dephasing_rate(m, n)?);
        }
    }
    let mut max_w = 0.0f64;
    for m in samples {
        for b in blocks {
            if b.target(system.hfi(), m).is_some() {
                max_w = max_w.max(system.transition_rate_exact(b, m)?.value);
            }
        }
    }
    Ok(ValidityReport { t_e: inverse(slowest_electron), t_coh: inverse(max_k), t_2: inverse(max_phi), t_1: inverse(max_w) })
}
