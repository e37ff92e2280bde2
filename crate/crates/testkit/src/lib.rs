//! Reference computations that share no code with the solver crates: plain
//! Kronecker-product Liouvillians, fixed-step integration, quadrature and
//! least-squares fits.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Column-stacked Liouvillian of `H` with Lindblad operators `(L_k, rate_k)`.
pub fn liouvillian(h: &CMat, ops: &[(CMat, f64)]) -> CMat {
    let d = h.nrows();
    let id = CMat::identity(d, d);
    let mi = Complex64::new(0.0, -1.0);
    let mut l = (kron(&id, h) - kron(&h.transpose(), &id)) * mi;
    for (op, rate) in ops {
        let ldl = op.adjoint() * op;
        let conj = op.map(|z| z.conj());
        l += (kron(&conj, op) - (kron(&id, &ldl) + kron(&ldl.transpose(), &id)) * c(0.5)) * c(*rate);
    }
    l
}

pub fn vec_of(m: &CMat) -> DVector<Complex64> {
    DVector::from_column_slice(m.as_slice())
}

pub fn unvec(v: &DVector<Complex64>, d: usize) -> CMat {
    CMat::from_column_slice(d, d, v.as_slice())
}

/// Classical fourth-order Runge–Kutta for `ẏ = L y`.
pub fn rk4(l: &CMat, y0: &DVector<Complex64>, t_end: f64, steps: usize) -> DVector<Complex64> {
    let h = c(t_end / steps as f64);
    let mut y = y0.clone();
    for _ in 0..steps {
        let k1 = l * &y;
        let k2 = l * (&y + &k1 * (h * 0.5));
        let k3 = l * (&y + &k2 * (h * 0.5));
        let k4 = l * (&y + &k3 * h);
        y += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * (h / 6.0);
    }
    y
}

/// Null vector of `l` with unit trace, from the smallest singular vector.
pub fn null_state(l: &CMat, d: usize) -> CMat {
    let svd = l.clone().svd(false, true);
    let vt = svd.v_t.expect("right singular vectors");
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |a, (i, &s)| if s < a.1 { (i, s) } else { a });
    let v: DVector<Complex64> = vt.row(k).adjoint();
    let m = unvec(&v, d);
    let tr = m.trace();
    m / tr
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Trapezoid rule on an arbitrary grid.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])).sum()
}

/// Driven, damped two-level electron `{g, e}` coupled to one nuclear spin-1/2.
#[derive(Debug, Clone, Copy)]
pub struct JointSystem {
    pub rabi: f64,
    pub gamma: f64,
    pub detuning: f64,
    /// Nuclear Zeeman frequency.
    pub omega_n: f64,
    /// Flip coupling: `λ (A ⊗ I_+ + A† ⊗ I_-)` with `A = σ_- + mix σ_+`.
    pub lambda: f64,
    pub mix: f64,
    /// Longitudinal coupling `κ S_z ⊗ I_z`.
    pub kappa: f64,
}

impl JointSystem {
    pub fn electron_hamiltonian(&self) -> CMat {
        CMat::from_row_slice(2, 2, &[c(0.0), c(self.rabi / 2.0), c(self.rabi / 2.0), c(self.detuning)])
    }

    /// `σ_- = |g⟩⟨e|`.
    pub fn lowering() -> CMat {
        CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)])
    }

    pub fn sz() -> CMat {
        CMat::from_row_slice(2, 2, &[c(-0.5), c(0.0), c(0.0), c(0.5)])
    }

    pub fn flip_operator(&self) -> CMat {
        Self::lowering() + Self::lowering().transpose() * c(self.mix)
    }

    /// Joint Liouvillian; joint index `electron * 2 + nucleus`, nucleus `{down, up}`.
    pub fn liouvillian(&self) -> CMat {
        let e2 = CMat::identity(2, 2);
        let ip = CMat::from_row_slice(2, 2, &[c(0.0), c(0.0), c(1.0), c(0.0)]);
        let a = self.flip_operator();
        let h = kron(&self.electron_hamiltonian(), &e2)
            + kron(&e2, &Self::sz()) * c(self.omega_n)
            + kron(&Self::sz(), &Self::sz()) * c(self.kappa)
            + (kron(&a, &ip) + kron(&a.adjoint(), &ip.adjoint())) * c(self.lambda);
        let decay = kron(&Self::lowering(), &e2);
        liouvillian(&h, &[(decay, self.gamma)])
    }

    /// Electron-only Liouvillian at nuclear field `h` (`S_z h` added).
    pub fn electron_liouvillian(&self, field: f64) -> CMat {
        let h = self.electron_hamiltonian() + Self::sz() * c(field);
        liouvillian(&h, &[(Self::lowering(), self.gamma)])
    }

    /// Relaxation rate of the nuclear polarization, by exponential fit of the
    /// joint evolution over `[T_1/10, T_1]` after a `10/γ` transient. `t1_guess`
    /// sets the window.
    pub fn fitted_relaxation_rate(&self, t1_guess: f64) -> f64 {
        let l = self.liouvillian();
        let p_down = null_state(&self.electron_liouvillian(-self.kappa / 2.0), 2);
        let nuc_down = CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let rho0 = vec_of(&kron(&p_down, &nuc_down));
        let rho_inf = null_state(&l, 4);
        let up_pop = |m: &CMat| (m[(1, 1)] + m[(3, 3)]).re;
        let p_inf = up_pop(&rho_inf);
        let start = (t1_guess / 10.0).max(10.0 / self.gamma);
        let n = 50;
        let ts: Vec<f64> = (0..n).map(|i| start + (t1_guess - start) * i as f64 / (n - 1) as f64).collect();
        let ys: Vec<f64> = ts
            .iter()
            .map(|&t| {
                let v = (&l * c(t)).exp() * &rho0;
                (up_pop(&unvec(&v, 4)) - p_inf).abs().ln()
            })
            .collect();
        -linear_fit(&ts, &ys).0
    }
}
