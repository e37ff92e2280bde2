use std::sync::Arc;

use crate::error::{LindbladError, Result};
use crate::operator::{ElectronBasis, Operator};

/// Incoherent decay `|from⟩ → |to⟩` at `rate` (1/μs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpChannel {
    pub from: usize,
    pub to: usize,
    pub rate: f64,
}

impl JumpChannel {
    pub fn new(from: usize, to: usize, rate: f64) -> Self {
        Self { from, to, rate }
    }
}

/// Pure dephasing of `state`: its coherences with every other state decay at
/// an extra `rate` (Lindblad operator `sqrt(2 rate) |s⟩⟨s|`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingChannel {
    pub state: usize,
    pub rate: f64,
}

impl DephasingChannel {
    pub fn new(state: usize, rate: f64) -> Self {
        Self { state, rate }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElectronModel {
    hamiltonian: Operator,
    jumps: Vec<JumpChannel>,
    dephasings: Vec<DephasingChannel>,
    closed: bool,
}

impl ElectronModel {
    /// An open model. At least one channel is required; zero rates are allowed.
    pub fn new(
        hamiltonian: Operator,
        jumps: Vec<JumpChannel>,
        dephasings: Vec<DephasingChannel>,
    ) -> Result<Self> {
        if jumps.is_empty() && dephasings.is_empty() {
            return Err(LindbladError::InvalidChannel(
                "open model needs at least one channel; use ElectronModel::closed".into(),
            ));
        }
        let model = Self { hamiltonian, jumps, dephasings, closed: false };
        model.validate()?;
        Ok(model)
    }

    /// A purely Hamiltonian model.
    pub fn closed(hamiltonian: Operator) -> Result<Self> {
        let model = Self { hamiltonian, jumps: Vec::new(), dephasings: Vec::new(), closed: true };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        self.hamiltonian.check_hermitian()?;
        let d = self.dim();
        for j in &self.jumps {
            if j.from >= d || j.to >= d {
                return Err(LindbladError::InvalidChannel(format!("jump {} -> {} out of range", j.from, j.to)));
            }
            if j.from == j.to {
                return Err(LindbladError::InvalidChannel(format!("jump {0} -> {0} is not a transition", j.from)));
            }
            if !(j.rate.is_finite() && j.rate >= 0.0) {
                return Err(LindbladError::InvalidChannel(format!("jump rate {} must be finite and >= 0", j.rate)));
            }
        }
        for p in &self.dephasings {
            if p.state >= d {
                return Err(LindbladError::InvalidChannel(format!("dephasing state {} out of range", p.state)));
            }
            if !(p.rate.is_finite() && p.rate >= 0.0) {
                return Err(LindbladError::InvalidChannel(format!("dephasing rate {} must be finite and >= 0", p.rate)));
            }
        }
        Ok(())
    }

    pub fn basis(&self) -> &Arc<ElectronBasis> {
        self.hamiltonian.basis()
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[JumpChannel] {
        &self.jumps
    }

    pub fn dephasings(&self) -> &[DephasingChannel] {
        &self.dephasings
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// True when some channel has a nonzero rate.
    pub fn is_dissipative(&self) -> bool {
        self.jumps.iter().any(|j| j.rate > 0.0) || self.dephasings.iter().any(|p| p.rate > 0.0)
    }

    /// Same channels with a different Hamiltonian.
    pub fn with_hamiltonian(&self, hamiltonian: Operator) -> Result<Self> {
        hamiltonian.ensure_basis(self.basis())?;
        let model = Self { hamiltonian, ..self.clone() };
        model.validate()?;
        Ok(model)
    }

    /// Total jump rate out of every state.
    pub fn jump_widths(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.dim()];
        for j in &self.jumps {
            w[j.from] += j.rate;
        }
        w
    }

    /// Total dephasing rate per state.
    pub fn dephasing_rates(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.dim()];
        for p in &self.dephasings {
            w[p.state] += p.rate;
        }
        w
    }

    /// Level widths `Γ_i`: jump out-rates plus the dephasing self-energy `2 γ_φ`.
    pub fn level_widths(&self) -> Vec<f64> {
        self.jump_widths()
            .into_iter()
            .zip(self.dephasing_rates())
            .map(|(g, p)| g + 2.0 * p)
            .collect()
    }
}
