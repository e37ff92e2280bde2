use std::path::Path;

use hfine_bath::NarrowingParams;
use hfine_lindblad::units::{mhz_to_angular, per_ns_to_per_us, per_s_to_per_us};
use hfine_nv::{dipolar_tensor, CarbonSite, ExcitedEnergies, NVParams, NitrogenSite, CARBON13_GYROMAGNETIC, ELECTRON_GYROMAGNETIC};
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// A scenario file. Units are part of every key name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub nv: NvSection,
    pub nitrogen: NitrogenSection,
    pub carbons: Vec<CarbonSection>,
    pub bath: BathSection,
    pub run: RunSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NvSection {
    #[serde(rename = "omega_A_MHz")]
    pub omega_a_mhz: f64,
    #[serde(rename = "omega_E_MHz")]
    pub omega_e_mhz: f64,
    #[serde(rename = "delta_A2_MHz")]
    pub delta_a2_mhz: f64,
    #[serde(rename = "omega_e_MHz")]
    pub zeeman_mhz: f64,
    #[serde(rename = "strain_MHz")]
    pub strain_mhz: f64,
    #[serde(rename = "D_gs_MHz")]
    pub d_gs_mhz: f64,
    #[serde(rename = "eps_Ey_MHz")]
    pub eps_ey_mhz: f64,
    #[serde(rename = "eps_A1_MHz")]
    pub eps_a1_mhz: f64,
    #[serde(rename = "eps_E1_MHz")]
    pub eps_e1_mhz: f64,
    #[serde(rename = "eps_E2_MHz")]
    pub eps_e2_mhz: f64,
    pub gamma_per_ns: f64,
    pub gamma_s1_per_ns: f64,
    pub gamma_s2_per_ns: f64,
    pub gamma_ce_per_ns: f64,
    pub gamma_s_per_ns: f64,
    pub gamma_phi_per_ns: f64,
    #[serde(rename = "drive_A2")]
    pub drive_a2: bool,
}

impl Default for NvSection {
    fn default() -> Self {
        let g = 1.0 / 12.0;
        Self {
            omega_a_mhz: 2.0,
            omega_e_mhz: 1.0,
            delta_a2_mhz: 3000.0,
            zeeman_mhz: 0.18,
            strain_mhz: 0.0,
            d_gs_mhz: 2870.0,
            eps_ey_mhz: 0.0,
            eps_a1_mhz: 1600.0,
            eps_e1_mhz: -1600.0,
            eps_e2_mhz: -1700.0,
            gamma_per_ns: g,
            gamma_s1_per_ns: g,
            gamma_s2_per_ns: g / 120.0,
            gamma_ce_per_ns: g / 800.0,
            gamma_s_per_ns: 1.0 / 300.0,
            gamma_phi_per_ns: 0.0,
            drive_a2: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NitrogenSection {
    #[serde(rename = "A_g_MHz")]
    pub a_g_mhz: f64,
    #[serde(rename = "A_e_MHz")]
    pub a_e_mhz: f64,
}

impl Default for NitrogenSection {
    fn default() -> Self {
        Self { a_g_mhz: 2.2, a_e_mhz: 40.0 }
    }
}

/// One ¹³C site, either by lattice position (point-dipole tensor) or by an
/// explicit tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarbonSection {
    pub position_nm: Option<[f64; 3]>,
    #[serde(rename = "tensor_MHz")]
    pub tensor_mhz: Option<[[f64; 3]; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BathSection {
    pub n_spins: usize,
    #[serde(rename = "A_par_MHz")]
    pub a_par_mhz: f64,
    #[serde(rename = "A_perp_MHz")]
    pub a_perp_mhz: f64,
    #[serde(rename = "gamma_C_per_s")]
    pub gamma_c_per_s: f64,
    #[serde(rename = "gamma_N_per_s")]
    pub gamma_n_per_s: f64,
}

impl Default for BathSection {
    fn default() -> Self {
        Self { n_spins: 400, a_par_mhz: 0.01, a_perp_mhz: 0.3, gamma_c_per_s: 2.5e-2, gamma_n_per_s: 0.0 }
    }
}

/// Either explicit values or an evenly (or log-evenly) spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Values(Vec<f64>),
    Range(RangeSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub log: bool,
}

impl GridSpec {
    pub fn range(min: f64, max: f64, points: usize) -> Self {
        GridSpec::Range(RangeSpec { min, max, points, log: false })
    }

    pub fn log_range(min: f64, max: f64, points: usize) -> Self {
        GridSpec::Range(RangeSpec { min, max, points, log: true })
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            GridSpec::Values(v) if v.is_empty() => Err(CliError::Config("empty value list".into())),
            GridSpec::Values(v) => Ok(v.clone()),
            GridSpec::Range(r) => {
                if r.points == 0 || !(r.max >= r.min) {
                    return Err(CliError::Config(format!("bad range {}..{} with {} points", r.min, r.max, r.points)));
                }
                if r.log && !(r.min > 0.0) {
                    return Err(CliError::Config("log range needs a positive lower end".into()));
                }
                if r.points == 1 {
                    return Ok(vec![r.min]);
                }
                let n = (r.points - 1) as f64;
                Ok((0..r.points)
                    .map(|i| {
                        let t = i as f64 / n;
                        if r.log {
                            r.min * (r.max / r.min).powf(t)
                        } else {
                            r.min + (r.max - r.min) * t
                        }
                    })
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BathModel {
    /// Large-bath limit of the birth–death chain on a refined field grid.
    Continuum,
    /// Finite birth–death chain on the `A_par` lattice.
    Lattice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    #[serde(rename = "delta_m_MHz")]
    pub delta_m_mhz: GridSpec,
    #[serde(rename = "omega_A_MHz")]
    pub omega_a_mhz: GridSpec,
    #[serde(rename = "omega_re_MHz")]
    pub omega_re_mhz: GridSpec,
    #[serde(rename = "omega_A_re_MHz")]
    pub omega_a_re_mhz: Vec<f64>,
    #[serde(rename = "photon_count_C")]
    pub photon_count: f64,
    pub bath_model: BathModel,
    #[serde(rename = "optimal_omega_A_MHz")]
    pub optimal_omega_a_mhz: Option<GridSpec>,
    pub kmc_events: u64,
    pub kmc_trajectories: usize,
    pub kmc_burn_in_events: u64,
    pub tolerance: f64,
    pub squeezing: SqueezingSection,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: 1,
            delta_m_mhz: GridSpec::range(-0.05, 0.05, 201),
            omega_a_mhz: GridSpec::log_range(2.0, 200.0, 21),
            omega_re_mhz: GridSpec::range(-0.6, 0.6, 241),
            omega_a_re_mhz: vec![3.2, 10.0, 8.0],
            photon_count: 12.0,
            bath_model: BathModel::Continuum,
            optimal_omega_a_mhz: None,
            kmc_events: 0,
            kmc_trajectories: 16,
            kmc_burn_in_events: 2000,
            tolerance: 1e-10,
            squeezing: SqueezingSection::default(),
        }
    }
}

/// Driven, damped spin-1/2 coupled to a collective nuclear spin through `S_z h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SqueezingSection {
    #[serde(rename = "rabi_MHz")]
    pub rabi_mhz: f64,
    #[serde(rename = "detuning_MHz")]
    pub detuning_mhz: f64,
    pub decay_per_us: f64,
    #[serde(rename = "coupling_MHz")]
    pub coupling_mhz: f64,
    /// Twice the collective nuclear spin.
    pub twice_spin: u32,
}

impl Default for SqueezingSection {
    fn default() -> Self {
        Self { rabi_mhz: 1.0, detuning_mhz: 0.5, decay_per_us: 5.0, coupling_mhz: 0.05, twice_spin: 40 }
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.check_finite()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Ok((Self::parse(&text)?, text))
    }

    fn check_finite(&self) -> Result<()> {
        let value = toml::Value::try_from(self).map_err(|e| CliError::Config(e.to_string()))?;
        fn walk(v: &toml::Value, path: &str) -> Result<()> {
            match v {
                toml::Value::Float(x) if !x.is_finite() => Err(CliError::Config(format!("{path} is not finite"))),
                toml::Value::Array(a) => a.iter().enumerate().try_for_each(|(i, x)| walk(x, &format!("{path}[{i}]"))),
                toml::Value::Table(t) => t.iter().try_for_each(|(k, x)| walk(x, &format!("{path}.{k}"))),
                _ => Ok(()),
            }
        }
        walk(&value, "config")
    }

    /// NV parameters in internal units. Sign and consistency checks happen
    /// where the model is built.
    pub fn nv_params(&self) -> NVParams {
        let n = &self.nv;
        let a1 = mhz_to_angular(n.eps_a1_mhz);
        let detuning_a2 = mhz_to_angular(n.delta_a2_mhz);
        NVParams {
            rabi_a: mhz_to_angular(n.omega_a_mhz),
            rabi_e: mhz_to_angular(n.omega_e_mhz),
            detuning_a2,
            zeeman: mhz_to_angular(n.zeeman_mhz),
            strain: mhz_to_angular(n.strain_mhz),
            zero_field: mhz_to_angular(n.d_gs_mhz),
            energies: ExcitedEnergies {
                ey: mhz_to_angular(n.eps_ey_mhz),
                a1,
                a2: a1 + detuning_a2,
                e1: mhz_to_angular(n.eps_e1_mhz),
                e2: mhz_to_angular(n.eps_e2_mhz),
            },
            gamma: per_ns_to_per_us(n.gamma_per_ns),
            gamma_s1: per_ns_to_per_us(n.gamma_s1_per_ns),
            gamma_s2: per_ns_to_per_us(n.gamma_s2_per_ns),
            gamma_ce: per_ns_to_per_us(n.gamma_ce_per_ns),
            gamma_s: per_ns_to_per_us(n.gamma_s_per_ns),
            gamma_phi: per_ns_to_per_us(n.gamma_phi_per_ns),
            drive_a2: n.drive_a2,
        }
    }

    pub fn nitrogen_site(&self) -> NitrogenSite {
        NitrogenSite { ground: mhz_to_angular(self.nitrogen.a_g_mhz), excited: mhz_to_angular(self.nitrogen.a_e_mhz) }
    }

    pub fn carbon_sites(&self) -> Result<Vec<CarbonSite>> {
        self.carbons
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let tensor = match (c.position_nm, c.tensor_mhz) {
                    (Some(r), None) => dipolar_tensor(Vector3::from(r), ELECTRON_GYROMAGNETIC, CARBON13_GYROMAGNETIC)?,
                    (None, Some(t)) => Matrix3::from_fn(|r, c| t[r][c]),
                    _ => {
                        return Err(CliError::Config(format!("carbons[{i}]: give exactly one of position_nm, tensor_MHz")))
                    }
                };
                Ok(CarbonSite::from_mhz(tensor)?)
            })
            .collect()
    }

    pub fn gamma_c(&self) -> f64 {
        per_s_to_per_us(self.bath.gamma_c_per_s)
    }

    pub fn gamma_n(&self) -> f64 {
        per_s_to_per_us(self.bath.gamma_n_per_s)
    }

    pub fn a_par(&self) -> f64 {
        mhz_to_angular(self.bath.a_par_mhz)
    }

    pub fn a_perp(&self) -> f64 {
        mhz_to_angular(self.bath.a_perp_mhz)
    }

    /// Thermal width of the uniform bath, rad/μs.
    pub fn sigma_eq(&self) -> f64 {
        (self.bath.n_spins as f64).sqrt() * self.a_par() / 2.0
    }

    pub fn narrowing_params(&self) -> Result<NarrowingParams> {
        Ok(NarrowingParams::from_nv(
            self.bath.n_spins,
            self.a_par(),
            self.a_perp(),
            self.gamma_c(),
            self.gamma_n(),
            &self.nv_params(),
        )?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = ScenarioConfig::parse("").unwrap();
        assert_eq!(c, ScenarioConfig::default());
        let (a, b) = (c.nv_params(), NVParams::default());
        let pairs = [
            (a.rabi_a, b.rabi_a),
            (a.rabi_e, b.rabi_e),
            (a.energies.a2, b.energies.a2),
            (a.gamma_s2, b.gamma_s2),
            (a.gamma_ce, b.gamma_ce),
            (a.gamma_s, b.gamma_s),
        ];
        for (x, y) in pairs {
            assert!((x - y).abs() <= 1e-12 * y.abs(), "{x} vs {y}");
        }
    }

    #[test]
    fn unknown_key_rejected() {
        let e = ScenarioConfig::parse("[nv]\nomega_A_MHz = 1.0\nomega_a = 2.0\n").unwrap_err();
        assert!(matches!(e, CliError::Config(_)));
        assert!(ScenarioConfig::parse("[nvv]\n").is_err());
        assert!(ScenarioConfig::parse("[run.squeezing]\nrabi = 1.0\n").is_err());
    }

    #[test]
    fn non_finite_rejected() {
        assert!(ScenarioConfig::parse("[nv]\nomega_A_MHz = nan\n").is_err());
        assert!(ScenarioConfig::parse("[run]\nomega_A_re_MHz = [1.0, inf]\n").is_err());
    }

    #[test]
    fn grids() {
        let c = ScenarioConfig::parse(
            "[run]\ndelta_m_MHz = { min = -1.0, max = 1.0, points = 5 }\nomega_A_MHz = [1.0, 2.0]\n\
             omega_re_MHz = { min = 1.0, max = 100.0, points = 3, log = true }\n",
        )
        .unwrap();
        assert_eq!(c.run.delta_m_mhz.values().unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(c.run.omega_a_mhz.values().unwrap(), vec![1.0, 2.0]);
        let l = c.run.omega_re_mhz.values().unwrap();
        assert!((l[1] - 10.0).abs() < 1e-12);
        assert!(GridSpec::range(1.0, 0.0, 3).values().is_err());
    }

    #[test]
    fn carbon_needs_one_description() {
        let c = ScenarioConfig::parse("[[carbons]]\nposition_nm = [0.3, 0.1, 0.2]\n").unwrap();
        assert_eq!(c.carbon_sites().unwrap().len(), 1);
        let bad = ScenarioConfig::parse("[[carbons]]\n").unwrap();
        assert!(bad.carbon_sites().is_err());
    }
}
