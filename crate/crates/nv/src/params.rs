use hfine_lindblad::units::{mhz_to_angular, per_ns_to_per_us};

use crate::error::{NvError, Result};

/// Electron levels kept in the model, in basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NvState {
    Zero,
    Bright,
    Dark,
    Ey,
    A1,
    A2,
    E1,
    E2,
    Singlet,
}

impl NvState {
    pub const ALL: [NvState; 9] = [
        NvState::Zero,
        NvState::Bright,
        NvState::Dark,
        NvState::Ey,
        NvState::A1,
        NvState::A2,
        NvState::E1,
        NvState::E2,
        NvState::Singlet,
    ];

    /// The four excited levels reached from `E_y` by a hyperfine flip.
    pub const FLIP_TARGETS: [NvState; 4] = [NvState::A1, NvState::A2, NvState::E1, NvState::E2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            NvState::Zero => "0",
            NvState::Bright => "b",
            NvState::Dark => "d",
            NvState::Ey => "Ey",
            NvState::A1 => "A1",
            NvState::A2 => "A2",
            NvState::E1 => "E1",
            NvState::E2 => "E2",
            NvState::Singlet => "S",
        }
    }
}

/// Lab-frame excited-state energies, rad/μs, on a common (arbitrary) origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitedEnergies {
    pub ey: f64,
    pub a1: f64,
    pub a2: f64,
    pub e1: f64,
    pub e2: f64,
}

impl ExcitedEnergies {
    pub fn of(&self, state: NvState) -> Option<f64> {
        match state {
            NvState::Ey => Some(self.ey),
            NvState::A1 => Some(self.a1),
            NvState::A2 => Some(self.a2),
            NvState::E1 => Some(self.e1),
            NvState::E2 => Some(self.e2),
            _ => None,
        }
    }
}

/// NV parameters in internal units: rad/μs for frequencies, 1/μs for rates.
#[derive(Debug, Clone, PartialEq)]
pub struct NVParams {
    /// Λ-laser Rabi frequency.
    pub rabi_a: f64,
    /// `|0⟩ ↔ E_y` Rabi frequency.
    pub rabi_e: f64,
    /// Detuning of the `A_2` level from the Λ laser.
    pub detuning_a2: f64,
    /// Ground Zeeman splitting `g μ_B B`.
    pub zeeman: f64,
    /// Transverse ground strain.
    pub strain: f64,
    /// Ground zero-field splitting.
    pub zero_field: f64,
    pub energies: ExcitedEnergies,
    /// Radiative decay of every excited level.
    pub gamma: f64,
    /// `A_1 → S` (also used for `E_1`, `E_2`).
    pub gamma_s1: f64,
    /// `A_2 → S`.
    pub gamma_s2: f64,
    /// `E_y` leak into the `±1` manifold, per ground level.
    pub gamma_ce: f64,
    /// Singlet decay back to `|0⟩`.
    pub gamma_s: f64,
    /// Pure dephasing of each excited level.
    pub gamma_phi: f64,
    /// When false the off-resonant `d → A_2` drive is switched off.
    pub drive_a2: bool,
}

impl Default for NVParams {
    fn default() -> Self {
        let gamma = per_ns_to_per_us(1.0 / 12.0);
        let detuning_a2 = mhz_to_angular(3000.0);
        let a1 = mhz_to_angular(1600.0);
        Self {
            rabi_a: mhz_to_angular(2.0),
            rabi_e: mhz_to_angular(1.0),
            detuning_a2,
            zeeman: mhz_to_angular(0.18),
            strain: 0.0,
            zero_field: mhz_to_angular(2870.0),
            energies: ExcitedEnergies {
                ey: 0.0,
                a1,
                a2: a1 + detuning_a2,
                e1: mhz_to_angular(-1600.0),
                e2: mhz_to_angular(-1700.0),
            },
            gamma,
            gamma_s1: gamma,
            gamma_s2: gamma / 120.0,
            gamma_ce: gamma / 800.0,
            gamma_s: per_ns_to_per_us(1.0 / 300.0),
            gamma_phi: 0.0,
            drive_a2: true,
        }
    }
}

impl NVParams {
    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("gamma", self.gamma),
            ("gamma_s1", self.gamma_s1),
            ("gamma_s2", self.gamma_s2),
            ("gamma_ce", self.gamma_ce),
            ("gamma_s", self.gamma_s),
            ("gamma_phi", self.gamma_phi),
        ];
        for (name, r) in rates {
            if !r.is_finite() || r < 0.0 {
                return Err(NvError::InvalidParams(format!("{name} = {r} must be finite and non-negative")));
            }
        }
        let freqs = [
            self.rabi_a,
            self.rabi_e,
            self.zeeman,
            self.strain,
            self.zero_field,
            self.energies.ey,
            self.energies.a1,
            self.energies.a2,
            self.energies.e1,
            self.energies.e2,
        ];
        if freqs.iter().any(|f| !f.is_finite()) {
            return Err(NvError::InvalidParams("non-finite frequency".into()));
        }
        if !(self.detuning_a2 > 0.0) || !self.detuning_a2.is_finite() {
            return Err(NvError::InvalidParams("A2 detuning must be positive".into()));
        }
        let expect = self.energies.a1 + self.detuning_a2;
        if (self.energies.a2 - expect).abs() > 1e-9 * expect.abs().max(1.0) {
            return Err(NvError::InvalidParams(format!(
                "A2 energy {} rad/us differs from A1 + detuning = {expect}",
                self.energies.a2
            )));
        }
        Ok(())
    }

    /// `Γ_{A1}`: jump width of `A_1`.
    pub fn width_a1(&self) -> f64 {
        self.gamma + self.gamma_s1
    }

    /// `Γ_{A2}`: jump width of `A_2`.
    pub fn width_a2(&self) -> f64 {
        self.gamma + self.gamma_s2
    }

    /// `Γ_{Ey}`: jump width of `E_y`.
    pub fn width_ey(&self) -> f64 {
        self.gamma + 2.0 * self.gamma_ce
    }

    /// Jump width of an excited level; zero for ground and singlet states.
    pub fn width(&self, state: NvState) -> f64 {
        match state {
            NvState::Ey => self.width_ey(),
            NvState::A1 | NvState::E1 | NvState::E2 => self.gamma + self.gamma_s1,
            NvState::A2 => self.width_a2(),
            NvState::Singlet => self.gamma_s,
            _ => 0.0,
        }
    }

    /// Keeps `ε_{A2} = ε_{A1} + Δ` while changing the detuning.
    pub fn with_detuning_a2(mut self, detuning: f64) -> Self {
        self.detuning_a2 = detuning;
        self.energies.a2 = self.energies.a1 + detuning;
        self
    }
}
