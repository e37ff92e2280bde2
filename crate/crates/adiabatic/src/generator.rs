use hfine_lindblad::Complex64;
use nalgebra::{DMatrix, DVector};

use crate::error::{AdiabaticError, Result};

/// Relative floor below which a negative rate is an error rather than round-off.
pub const NEGATIVE_RATE_FLOOR: f64 = 1e-8;
const DENSE_LIMIT: usize = 4096;

/// A population transfer `from → to` at `rate` (1/μs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub rate: f64,
}

/// Generator `G` of `ṗ = G p` over a finite configuration set.
#[derive(Debug, Clone)]
pub struct RelaxationGenerator {
    n: usize,
    transitions: Vec<Transition>,
    out_rate: Vec<f64>,
    incoming: Vec<Vec<(usize, f64)>>,
}

/// Assembles the generator, clipping negatives above the tolerance floor.
pub fn relaxation_generator(n_states: usize, transitions: &[Transition]) -> Result<RelaxationGenerator> {
    let scale = transitions.iter().fold(0.0f64, |a, t| a.max(t.rate.abs()));
    let mut kept = Vec::with_capacity(transitions.len());
    let mut out_rate = vec![0.0; n_states];
    let mut incoming = vec![Vec::new(); n_states];
    for &t in transitions {
        if t.from >= n_states {
            return Err(AdiabaticError::IndexOutOfRange(t.from));
        }
        if t.to >= n_states {
            return Err(AdiabaticError::IndexOutOfRange(t.to));
        }
        if !t.rate.is_finite() || t.rate < -NEGATIVE_RATE_FLOOR * scale {
            return Err(AdiabaticError::NegativeRate { from: t.from, to: t.to, rate: t.rate });
        }
        if t.from == t.to || t.rate <= 0.0 {
            continue;
        }
        out_rate[t.from] += t.rate;
        incoming[t.to].push((t.from, t.rate));
        kept.push(t);
    }
    Ok(RelaxationGenerator { n: n_states, transitions: kept, out_rate, incoming })
}

impl RelaxationGenerator {
    pub fn n_states(&self) -> usize {
        self.n
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn out_rates(&self) -> &[f64] {
        &self.out_rate
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(self.n, self.n);
        for t in &self.transitions {
            g[(t.to, t.from)] += t.rate;
            g[(t.from, t.from)] -= t.rate;
        }
        g
    }

    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = p.iter().zip(&self.out_rate).map(|(x, r)| -x * r).collect();
        for t in &self.transitions {
            out[t.to] += t.rate * p[t.from];
        }
        out
    }

    /// Stationary distribution. Dense LU with one row swapped for the
    /// normalization up to 4096 states, Gauss–Seidel sweeps above.
    pub fn stationary(&self) -> Result<Vec<f64>> {
        if self.transitions.is_empty() {
            return if self.n == 1 {
                Ok(vec![1.0])
            } else {
                Err(AdiabaticError::Stationary("no transitions: every state is absorbing".into()))
            };
        }
        let p = if self.n <= DENSE_LIMIT { self.stationary_dense()? } else { self.stationary_iterative(1e-12, 200_000)? };
        finish_distribution(p)
    }

    fn stationary_dense(&self) -> Result<Vec<f64>> {
        let mut g = self.to_dense();
        let scale = g.amax();
        for k in 0..self.n {
            g[(0, k)] = 1.0;
        }
        let mut rhs = DVector::zeros(self.n);
        rhs[0] = 1.0;
        let lu = g.clone().lu();
        let min_pivot = lu.u().diagonal().iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
        if min_pivot < 1e-13 * scale.max(1.0) {
            return Err(AdiabaticError::Stationary("generator has several closed classes".into()));
        }
        let p = lu.solve(&rhs).ok_or_else(|| AdiabaticError::Stationary("singular system".into()))?;
        Ok(p.iter().copied().collect())
    }

    /// Gauss–Seidel on the balance equations, renormalized each sweep.
    pub fn stationary_iterative(&self, tol: f64, max_sweeps: usize) -> Result<Vec<f64>> {
        if self.out_rate.iter().any(|&r| r == 0.0) {
            return Err(AdiabaticError::Stationary("absorbing state present".into()));
        }
        let max_rate = self.out_rate.iter().fold(0.0f64, |a, &b| a.max(b));
        let mut p = vec![1.0 / self.n as f64; self.n];
        for _ in 0..max_sweeps {
            for i in 0..self.n {
                let inflow: f64 = self.incoming[i].iter().map(|&(j, w)| w * p[j]).sum();
                p[i] = inflow / self.out_rate[i];
            }
            let s: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= s);
            let res: f64 = self.apply(&p).iter().map(|x| x.abs()).sum();
            if res <= tol * max_rate {
                return Ok(p);
            }
        }
        Err(AdiabaticError::Stationary("Gauss-Seidel did not converge".into()))
    }

    /// `p(t) = e^{G t} p0` by uniformization.
    pub fn propagate(&self, p0: &[f64], t: f64) -> Result<Vec<f64>> {
        let lambda = self.out_rate.iter().fold(0.0f64, |a, &b| a.max(b));
        if lambda == 0.0 || t == 0.0 {
            return Ok(p0.to_vec());
        }
        let lt = lambda * t;
        if lt > 1e7 {
            return Err(AdiabaticError::Stationary(format!("uniformization needs ~{lt:.0} terms")));
        }
        let k_max = (lt + 12.0 * lt.sqrt() + 40.0).ceil() as usize;
        let mut term = p0.to_vec();
        let mut acc = vec![0.0; self.n];
        // Poisson weights in log space to survive large λt.
        let mut log_w = -lt;
        for k in 0..=k_max {
            let w = log_w.exp();
            for (a, x) in acc.iter_mut().zip(&term) {
                *a += w * x;
            }
            let g = self.apply(&term);
            for (x, gx) in term.iter_mut().zip(g) {
                *x += gx / lambda;
            }
            log_w += lt.ln() - ((k + 1) as f64).ln();
        }
        Ok(acc)
    }

    /// Eigenvalues of the dense generator.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.to_dense().complex_eigenvalues().iter().map(|z| Complex64::new(z.re, z.im)).collect()
    }

    /// Smallest nonzero `|Re λ|`, the slowest relaxation rate.
    pub fn slowest_relaxation_rate(&self) -> Option<f64> {
        let ev = self.eigenvalues();
        let scale = self.out_rate.iter().fold(0.0f64, |a, &b| a.max(b));
        ev.iter().map(|z| z.re.abs()).filter(|&r| r > 1e-10 * scale).fold(None, |a, r| Some(a.map_or(r, |x: f64| x.min(r))))
    }

    /// Population-weighted escape rate `Σ_i p_i Σ_j W_{j←i}`.
    pub fn mean_escape_rate(&self, p: &[f64]) -> f64 {
        p.iter().zip(&self.out_rate).map(|(x, r)| x * r).sum()
    }
}

fn finish_distribution(mut p: Vec<f64>) -> Result<Vec<f64>> {
    let min = p.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if min < -1e-10 {
        return Err(AdiabaticError::Stationary(format!("negative population {min:.3e}")));
    }
    p.iter_mut().for_each(|x| *x = x.max(0.0));
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(from: usize, to: usize, rate: f64) -> Transition {
        Transition { from, to, rate }
    }

    #[test]
    fn zero_rates_give_zero_generator() {
        let g = relaxation_generator(3, &[t(0, 1, 0.0), t(1, 2, 0.0)]).unwrap();
        assert!(g.to_dense().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn symmetric_pair_is_uniform() {
        let g = relaxation_generator(2, &[t(0, 1, 3.0), t(1, 0, 3.0)]).unwrap();
        let p = g.stationary().unwrap();
        assert!((p[0] - 0.5).abs() < 1e-14 && (p[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn negative_rates() {
        let g = relaxation_generator(2, &[t(0, 1, 1.0), t(1, 0, -1e-10)]).unwrap();
        assert_eq!(g.transitions().len(), 1);
        assert!(matches!(
            relaxation_generator(2, &[t(0, 1, 1.0), t(1, 0, -1e-3)]),
            Err(AdiabaticError::NegativeRate { .. })
        ));
    }

    fn chain() -> RelaxationGenerator {
        // Spin-1 chain with unequal edge rates.
        relaxation_generator(3, &[t(0, 1, 2.0), t(1, 0, 0.5), t(2, 1, 2.0), t(1, 2, 0.5)]).unwrap()
    }

    #[test]
    fn chain_matches_eigensolver_null_vector() {
        let g = chain();
        let p = g.stationary().unwrap();
        // Null vector of G as the lowest eigenvector of G^T G.
        let dense = g.to_dense();
        let eig = (dense.transpose() * &dense).symmetric_eigen();
        let (k, _) = eig.eigenvalues.iter().enumerate().fold((0, f64::INFINITY), |a, (i, &v)| if v < a.1 { (i, v) } else { a });
        let v = eig.eigenvectors.column(k);
        let s: f64 = v.iter().sum();
        for i in 0..3 {
            assert!((p[i] - v[i] / s).abs() < 1e-12);
        }
        let cols = dense.row_sum();
        assert!(cols.iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn iterative_matches_dense() {
        let g = chain();
        let a = g.stationary().unwrap();
        let b = g.stationary_iterative(1e-14, 10_000).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn propagation_conserves_and_relaxes() {
        let g = chain();
        let p0 = [1.0, 0.0, 0.0];
        let p = g.propagate(&p0, 0.3).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let dense = (g.to_dense() * 0.3).exp() * DVector::from_column_slice(&p0);
        for i in 0..3 {
            assert!((p[i] - dense[i]).abs() < 1e-12);
        }
        let late = g.propagate(&p0, 200.0).unwrap();
        let ss = g.stationary().unwrap();
        for i in 0..3 {
            assert!((late[i] - ss[i]).abs() < 1e-9);
        }
        let slow = g.slowest_relaxation_rate().unwrap();
        assert!(slow > 0.0);
    }
}
