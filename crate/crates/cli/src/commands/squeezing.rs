use hfine_adiabatic::{mean_field_generator, AdiabaticSystem, LongitudinalHfi};
use hfine_lindblad::units::{angular_to_mhz, mhz_to_angular};
use hfine_lindblad::{CMatrix, Complex64, ElectronBasis, ElectronModel, JumpChannel, Operator};

use super::{CommandOutput, RunInput};
use crate::config::SqueezingSection;
use crate::error::{CliError, Result};
use crate::output::{Column, OutputFile, Table};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingPoint {
    /// Collective projection `m`.
    pub m: f64,
    /// `h = a m`, rad/μs.
    pub field: f64,
    pub spin_z: f64,
    /// Diagonal of `H_eff = h ⟨S_z⟩_h`, rad/μs.
    pub energy: f64,
}

/// Driven spin-1/2 (`dn`, `up`), detuned by `Δ`, decaying `up → dn`, coupled
/// to the nuclear field through `S_z h`.
fn toy_system(s: &SqueezingSection) -> Result<AdiabaticSystem> {
    let basis = ElectronBasis::new(["dn", "up"])?;
    let c = |x: f64| Complex64::new(x, 0.0);
    let rabi = mhz_to_angular(s.rabi_mhz);
    let detuning = mhz_to_angular(s.detuning_mhz);
    let h = CMatrix::from_row_slice(2, 2, &[c(0.0), c(rabi / 2.0), c(rabi / 2.0), c(detuning)]);
    let model = ElectronModel::new(
        Operator::hermitian(basis.clone(), h)?,
        vec![JumpChannel::new(1, 0, s.decay_per_us)],
        vec![],
    )?;
    let sz = Operator::hermitian(basis, CMatrix::from_row_slice(2, 2, &[c(-0.5), c(0.0), c(0.0), c(0.5)]))?;
    let hfi = LongitudinalHfi::new(sz, vec![mhz_to_angular(s.coupling_mhz)], vec![s.twice_spin])?;
    Ok(AdiabaticSystem::new(model, hfi)?)
}

pub fn squeezing_points(s: &SqueezingSection) -> Result<Vec<SqueezingPoint>> {
    if s.twice_spin == 0 {
        return Err(CliError::Config("squeezing twice_spin must be positive".into()));
    }
    let system = toy_system(s)?;
    let a = mhz_to_angular(s.coupling_mhz);
    let ms: Vec<f64> = (0..=s.twice_spin).map(|k| k as f64 - s.twice_spin as f64 / 2.0).collect();
    let fields: Vec<f64> = ms.iter().map(|m| a * m).collect();
    let energies = mean_field_generator(&system, &fields)?;
    ms.iter()
        .zip(&fields)
        .zip(energies)
        .map(|((&m, &field), energy)| {
            Ok(SqueezingPoint { m, field, spin_z: system.mean_operator(field)?, energy })
        })
        .collect()
}

/// `⟨S_z⟩_h` and the mean-field generator over the collective spin states.
pub fn squeezing_demo(input: &RunInput<'_>) -> Result<CommandOutput> {
    let points = squeezing_points(&input.config.run.squeezing)?;
    let mut t = Table::new(vec![
        Column::new("m", "1", "collective nuclear projection"),
        Column::new("h_MHz", "MHz", "nuclear field a*m"),
        Column::new("S_z", "1", "electron steady-state <S_z> at this field"),
        Column::new("H_eff_MHz", "MHz", "mean-field generator h <S_z>_h"),
    ]);
    for p in &points {
        t.push(vec![p.m, angular_to_mhz(p.field), p.spin_z, angular_to_mhz(p.energy)]);
    }
    let mut out = CommandOutput::default();
    // Largest second difference of H_eff, a direct measure of nonlinearity.
    let curvature = points
        .windows(3)
        .map(|w| (w[2].energy - 2.0 * w[1].energy + w[0].energy).abs())
        .fold(0.0, f64::max);
    out.summary.insert("max_second_difference_MHz".into(), angular_to_mhz(curvature));
    out.files.push(OutputFile {
        name: "squeezing.csv".into(),
        contents: t.render(&input.provenance("squeezing-demo"), "mean-field nuclear generator"),
    });
    Ok(out)
}
