use hfine_lindblad::{
    liouvillian_integral, liouvillian_integral_projected, split_diag_offdiag, Complex64, DiagResolvent, Operator,
};

use crate::error::{at_field, AdiabaticError, Result};
use crate::hfi::{NuclearConfig, TransverseBlock};
use crate::system::AdiabaticSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RateMethod {
    Exact,
    ExactK,
    Perturbative,
    GoldenRuleOnly,
}

impl RateMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            RateMethod::Exact => "exact",
            RateMethod::ExactK => "exact_K",
            RateMethod::Perturbative => "perturbative",
            RateMethod::GoldenRuleOnly => "golden_rule_only",
        }
    }
}

/// A nuclear flip rate in 1/μs.
#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    pub value: f64,
    pub method: RateMethod,
    /// First-order term of the Dyson expansion (perturbative methods only).
    pub golden_part: Option<f64>,
    /// Second-order correction from the off-diagonal Liouvillian.
    pub coherent_part: Option<f64>,
    /// `min |z| / ‖L^nd‖`; values below 10 make the expansion doubtful.
    pub expansion_ratio: Option<f64>,
}

impl RateResult {
    fn plain(value: f64, method: RateMethod) -> Self {
        Self { value, method, golden_part: None, coherent_part: None, expansion_ratio: None }
    }

    pub fn zero(method: RateMethod) -> Self {
        let mut r = Self::plain(0.0, method);
        if matches!(method, RateMethod::Perturbative | RateMethod::GoldenRuleOnly) {
            r.golden_part = Some(0.0);
            r.coherent_part = Some(0.0);
        }
        r
    }
}

/// Closed-form golden-rule and coherent parts for `V = λ|f⟩⟨i|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleTransitionParts {
    pub golden: f64,
    pub coherent: f64,
}

/// `(f, i, λ)` when `op` has exactly one nonzero entry off the diagonal.
pub fn single_transition(op: &Operator) -> Option<(usize, usize, Complex64)> {
    let d = op.dim();
    let mut found = None;
    for c in 0..d {
        for r in 0..d {
            let v = op.get(r, c);
            if v != Complex64::new(0.0, 0.0) {
                if found.is_some() || r == c {
                    return None;
                }
                found = Some((r, c, v));
            }
        }
    }
    found
}

impl AdiabaticSystem {
    fn block_setup(&self, block: &TransverseBlock, from: &NuclearConfig) -> Result<(NuclearConfig, Operator)> {
        self.hfi().validate(from)?;
        let to = block
            .target(self.hfi(), from)
            .ok_or_else(|| AdiabaticError::BlockNotApplicable(from.to_string()))?;
        let v = block.coupling(self.hfi(), from)?;
        v.ensure_basis(self.model().basis())?;
        Ok((to, v))
    }

    /// Flip rate `W_{p←m} = 2 Re Tr[V† ∫ e^{iωt} e^{L_{p,m} t} (V P_{m,m}) dt]`.
    pub fn transition_rate_exact(&self, block: &TransverseBlock, from: &NuclearConfig) -> Result<RateResult> {
        self.exact_rate(block, from, false)
    }

    /// As [`Self::transition_rate_exact`] with the kernel
    /// `L_{p,m} - i{•, K_p - K_m}/2`.
    pub fn transition_rate_exact_k(&self, block: &TransverseBlock, from: &NuclearConfig) -> Result<RateResult> {
        self.exact_rate(block, from, true)
    }

    fn exact_rate(&self, block: &TransverseBlock, from: &NuclearConfig, with_k: bool) -> Result<RateResult> {
        let method = if with_k { RateMethod::ExactK } else { RateMethod::Exact };
        let (to, v) = self.block_setup(block, from)?;
        if v.norm() == 0.0 {
            return Ok(RateResult::zero(method));
        }
        let (h_m, h_p) = (self.field(from), self.field(&to));
        let mean = 0.5 * (h_m + h_p);
        let p = self.steady_state(h_m)?;
        let mut l = self.liouvillian(mean)?;
        if with_k {
            let dk = self.hfi().k_operator(h_p - h_m);
            l.add_anticommutator(&dk, Complex64::new(0.0, -0.5))?;
        }
        let x = &v * p.as_operator();
        let y = liouvillian_integral(&l, block.frequency, &x).map_err(at_field(mean))?;
        let w = 2.0 * (&v.dagger() * &y).trace().re;
        Ok(RateResult::plain(w, method))
    }

    /// Dyson-expanded rate `-2 Re Tr V† (G^d - G^d L^nd G^d) V P_{m,m}`, split
    /// into the first-order (golden) and second-order (coherent) terms.
    pub fn transition_rate_perturbative(&self, block: &TransverseBlock, from: &NuclearConfig) -> Result<RateResult> {
        let (to, v) = self.block_setup(block, from)?;
        if v.norm() == 0.0 {
            return Ok(RateResult::zero(RateMethod::Perturbative));
        }
        let (h_m, h_p) = (self.field(from), self.field(&to));
        let mean = 0.5 * (h_m + h_p);
        let p = self.steady_state(h_m)?;
        let model = self.shifted_model(mean)?;
        let (_, l_nd) = split_diag_offdiag(&model).map_err(at_field(mean))?;
        let g = DiagResolvent::new(&model, None, block.frequency).map_err(at_field(mean))?;

        let x = &v * p.as_operator();
        let y1 = g.apply(&x)?;
        let y2 = g.apply(&l_nd.apply(&y1)?)?;
        let vd = v.dagger();
        let golden = -2.0 * (&vd * &y1).trace().re;
        let coherent = 2.0 * (&vd * &y2).trace().re;

        let d = model.dim();
        let mut min_z = f64::INFINITY;
        for a in 0..d {
            for b in 0..d {
                min_z = min_z.min(g.z(a, b).norm());
            }
        }
        let nd_norm = l_nd.norm();
        let ratio = if nd_norm > 0.0 { min_z / nd_norm } else { f64::INFINITY };
        Ok(RateResult {
            value: golden + coherent,
            method: RateMethod::Perturbative,
            golden_part: Some(golden),
            coherent_part: Some(coherent),
            expansion_ratio: Some(ratio),
        })
    }

    /// Golden-rule term only.
    pub fn transition_rate_golden(&self, block: &TransverseBlock, from: &NuclearConfig) -> Result<RateResult> {
        let mut r = self.transition_rate_perturbative(block, from)?;
        r.value = r.golden_part.unwrap_or(0.0);
        r.method = RateMethod::GoldenRuleOnly;
        Ok(r)
    }

    pub fn transition_rate(&self, method: RateMethod, block: &TransverseBlock, from: &NuclearConfig) -> Result<RateResult> {
        match method {
            RateMethod::Exact => self.transition_rate_exact(block, from),
            RateMethod::ExactK => self.transition_rate_exact_k(block, from),
            RateMethod::Perturbative => self.transition_rate_perturbative(block, from),
            RateMethod::GoldenRuleOnly => self.transition_rate_golden(block, from),
        }
    }

    /// Closed forms for a single-entry coupling `λ|f⟩⟨i|`:
    /// golden `= 2|λ|² P_ii (Γ_f+Γ_i)/2 / |z_fi|²` and
    /// coherent `= 2|λ|² Im Σ_j P_ij H^nd_ji / (z_fi z_fj)`.
    pub fn single_transition_parts(&self, block: &TransverseBlock, from: &NuclearConfig) -> Result<Option<SingleTransitionParts>> {
        let (to, v) = self.block_setup(block, from)?;
        let Some((f, i, lambda)) = single_transition(&v) else {
            return Ok(None);
        };
        let (h_m, h_p) = (self.field(from), self.field(&to));
        let mean = 0.5 * (h_m + h_p);
        let p = self.steady_state(h_m)?;
        let model = self.shifted_model(mean)?;
        let g = DiagResolvent::new(&model, None, block.frequency).map_err(at_field(mean))?;
        let lam2 = lambda.norm_sqr();
        let z_fi = g.z(f, i);
        let golden = -2.0 * lam2 * p.matrix()[(i, i)].re * z_fi.im / z_fi.norm_sqr();
        let h = model.hamiltonian();
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..model.dim() {
            if j == i {
                continue;
            }
            s += p.matrix()[(i, j)] * h.get(j, i) / (z_fi * g.z(f, j));
        }
        Ok(Some(SingleTransitionParts { golden, coherent: 2.0 * lam2 * s.im }))
    }

    /// Pure dephasing `Γ^φ = Re ∫ Tr K̃ e^{L_{m,n} t} K̃ P_{m,n} dt` with
    /// `K̃ = K_m - K_n - ⟨K_m - K_n⟩_{m,n}`.
    pub fn dephasing_rate(&self, m: &NuclearConfig, n: &NuclearConfig) -> Result<f64> {
        self.hfi().validate(m)?;
        self.hfi().validate(n)?;
        let (h_m, h_n) = (self.field(m), self.field(n));
        if h_m == h_n {
            return Ok(0.0);
        }
        let mean = 0.5 * (h_m + h_n);
        let p = self.steady_state(mean)?;
        let l = self.liouvillian(mean)?;
        let k = self.hfi().k_operator(h_m - h_n);
        let avg = k.expectation(&p);
        let kt = &k - &Operator::identity(k.basis()).scale(avg);
        if kt.norm() <= 1e-14 * k.norm() {
            return Ok(0.0);
        }
        let x = &kt * p.as_operator();
        let y = liouvillian_integral_projected(&l, &p, &x).map_err(at_field(mean))?;
        Ok((&kt * &y).trace().re)
    }

    /// Coherence-sector flip rate `W_{p←m|n}` for a block acting on `m`.
    pub fn coherence_flip_rate(&self, block: &TransverseBlock, m: &NuclearConfig, n: &NuclearConfig) -> Result<f64> {
        let (p_cfg, v) = self.block_setup(block, m)?;
        if v.norm() == 0.0 {
            return Ok(0.0);
        }
        self.hfi().validate(n)?;
        let (h_m, h_n, h_p) = (self.field(m), self.field(n), self.field(&p_cfg));
        let p_mn = self.steady_state(0.5 * (h_m + h_n))?;
        let p_pn = self.steady_state(0.5 * (h_p + h_n))?;
        let mean_pn = 0.5 * (h_p + h_n);
        let l = self.liouvillian(mean_pn)?;
        let avg = v.expectation(&p_mn);
        let x = &(&v * p_mn.as_operator()) - &p_pn.as_operator().scale(avg);
        let y = liouvillian_integral(&l, block.frequency, &x).map_err(at_field(mean_pn))?;
        Ok(2.0 * (&v.dagger() * &y).trace().re)
    }

    /// Total decay rate of the nuclear coherence `p^(m,n)`:
    /// `Γ^φ_{m,n} + ½ Σ_blocks (W_{p←m|n} + W_{p←n|m})`.
    pub fn coherence_decay_rate(&self, blocks: &[TransverseBlock], m: &NuclearConfig, n: &NuclearConfig) -> Result<f64> {
        let mut total = self.dephasing_rate(m, n)?;
        for b in blocks {
            if b.target(self.hfi(), m).is_some() {
                total += 0.5 * self.coherence_flip_rate(b, m, n)?;
            }
            if b.target(self.hfi(), n).is_some() {
                total += 0.5 * self.coherence_flip_rate(b, n, m)?;
            }
        }
        Ok(total)
    }
}
