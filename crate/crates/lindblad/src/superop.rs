use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{LindbladError, Result};
use crate::model::ElectronModel;
use crate::operator::{CMatrix, ElectronBasis, Operator};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense `d^2 x d^2` matrix acting on column-stacked operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    basis: Arc<ElectronBasis>,
    matrix: CMatrix,
    dissipative: bool,
}

#[inline]
pub(crate) fn vec_index(d: usize, row: usize, col: usize) -> usize {
    row + d * col
}

pub(crate) fn vectorize(op: &Operator) -> DVector<Complex64> {
    let m = op.matrix();
    DVector::from_column_slice(m.as_slice())
}

pub(crate) fn unvectorize(basis: &Arc<ElectronBasis>, v: &DVector<Complex64>) -> Operator {
    let d = basis.dim();
    Operator::new(basis.clone(), CMatrix::from_column_slice(d, d, v.as_slice())).expect("dimension checked")
}

impl Superoperator {
    pub fn new(basis: Arc<ElectronBasis>, matrix: CMatrix, dissipative: bool) -> Result<Self> {
        let d2 = basis.dim() * basis.dim();
        if matrix.nrows() != d2 || matrix.ncols() != d2 {
            return Err(LindbladError::ShapeMismatch { rows: matrix.nrows(), cols: matrix.ncols(), dim: d2 });
        }
        Ok(Self { basis, matrix, dissipative })
    }

    pub fn zeros(basis: &Arc<ElectronBasis>) -> Self {
        let d2 = basis.dim() * basis.dim();
        Self { basis: basis.clone(), matrix: CMatrix::zeros(d2, d2), dissipative: false }
    }

    /// `X ↦ -i [H, X]`.
    pub fn commutator(h: &Operator) -> Self {
        let mut s = Self::zeros(h.basis());
        s.add_hamiltonian(h);
        s
    }

    /// `X ↦ A X`.
    pub fn left(a: &Operator) -> Self {
        let mut s = Self::zeros(a.basis());
        s.add_left(a, Complex64::new(1.0, 0.0));
        s
    }

    /// `X ↦ X B`.
    pub fn right(b: &Operator) -> Self {
        let mut s = Self::zeros(b.basis());
        s.add_right(b, Complex64::new(1.0, 0.0));
        s
    }

    /// `rate · D[A]` for a general Lindblad operator `A`.
    pub fn dissipator(a: &Operator, rate: f64) -> Self {
        let basis = a.basis();
        let d = basis.dim();
        let am = a.matrix();
        let ada = am.adjoint() * am;
        let mut s = Self::zeros(basis);
        let c = Complex64::new(rate, 0.0);
        // A X A^†  →  conj(A) ⊗ A
        for c1 in 0..d {
            for c2 in 0..d {
                let ac = am[(c1, c2)].conj();
                if ac == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for r1 in 0..d {
                    for r2 in 0..d {
                        s.matrix[(vec_index(d, r1, c1), vec_index(d, r2, c2))] += c * ac * am[(r1, r2)];
                    }
                }
            }
        }
        let ada_op = Operator::new(basis.clone(), ada).expect("same dimension");
        s.add_left(&ada_op, -0.5 * c);
        s.add_right(&ada_op, -0.5 * c);
        s.dissipative = rate > 0.0;
        s
    }

    pub(crate) fn add_hamiltonian(&mut self, h: &Operator) {
        self.add_left(h, -I);
        self.add_right(h, I);
    }

    pub(crate) fn add_left(&mut self, a: &Operator, coeff: Complex64) {
        let d = self.basis.dim();
        let am = a.matrix();
        for c in 0..d {
            for r in 0..d {
                for r2 in 0..d {
                    let v = am[(r, r2)];
                    if v != Complex64::new(0.0, 0.0) {
                        self.matrix[(vec_index(d, r, c), vec_index(d, r2, c))] += coeff * v;
                    }
                }
            }
        }
    }

    pub(crate) fn add_right(&mut self, b: &Operator, coeff: Complex64) {
        let d = self.basis.dim();
        let bm = b.matrix();
        for c in 0..d {
            for c2 in 0..d {
                let v = bm[(c2, c)];
                if v != Complex64::new(0.0, 0.0) {
                    for r in 0..d {
                        self.matrix[(vec_index(d, r, c), vec_index(d, r, c2))] += coeff * v;
                    }
                }
            }
        }
    }

    /// Adds `coeff · {K, •}`; used for the non-Hermitian longitudinal kernel.
    pub fn add_anticommutator(&mut self, k: &Operator, coeff: Complex64) -> Result<()> {
        k.ensure_basis(&self.basis)?;
        self.add_left(k, coeff);
        self.add_right(k, coeff);
        Ok(())
    }

    pub(crate) fn add_jump(&mut self, from: usize, to: usize, rate: f64) {
        let d = self.basis.dim();
        let r = Complex64::new(rate, 0.0);
        self.matrix[(vec_index(d, to, to), vec_index(d, from, from))] += r;
        for b in 0..d {
            let k = vec_index(d, from, b);
            self.matrix[(k, k)] -= 0.5 * r;
            let k = vec_index(d, b, from);
            self.matrix[(k, k)] -= 0.5 * r;
        }
        if rate > 0.0 {
            self.dissipative = true;
        }
    }

    pub(crate) fn add_dephasing(&mut self, state: usize, rate: f64) {
        let d = self.basis.dim();
        let r = Complex64::new(rate, 0.0);
        for b in 0..d {
            if b == state {
                continue;
            }
            let k = vec_index(d, state, b);
            self.matrix[(k, k)] -= r;
            let k = vec_index(d, b, state);
            self.matrix[(k, k)] -= r;
        }
        if rate > 0.0 {
            self.dissipative = true;
        }
    }

    pub fn basis(&self) -> &Arc<ElectronBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Whether some dissipative channel with nonzero rate went into this map.
    pub fn is_dissipative(&self) -> bool {
        self.dissipative
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn apply(&self, x: &Operator) -> Result<Operator> {
        x.ensure_basis(&self.basis)?;
        Ok(unvectorize(&self.basis, &(&self.matrix * vectorize(x))))
    }

    pub fn plus(&self, other: &Superoperator) -> Result<Superoperator> {
        if *self.basis != *other.basis {
            return Err(LindbladError::BasisMismatch);
        }
        Ok(Self {
            basis: self.basis.clone(),
            matrix: &self.matrix + &other.matrix,
            dissipative: self.dissipative || other.dissipative,
        })
    }

    pub fn scaled(&self, c: f64) -> Superoperator {
        Self { basis: self.basis.clone(), matrix: &self.matrix * Complex64::new(c, 0.0), dissipative: self.dissipative }
    }

    /// Eigenvalues via a complex Schur decomposition.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let schur = self
            .matrix
            .clone()
            .try_schur(f64::EPSILON, 100_000)
            .ok_or_else(|| LindbladError::Eigen("Schur decomposition did not converge".into()))?;
        let (_, t) = schur.unpack();
        Ok(t.diagonal().iter().copied().collect())
    }

    /// Propagator `exp(L t)`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        (&self.matrix * Complex64::new(t, 0.0)).exp()
    }
}

/// Liouvillian of `model`, optionally with an extra Hermitian term added to
/// its Hamiltonian.
pub fn build_liouvillian(model: &ElectronModel, extra_hamiltonian: Option<&Operator>) -> Result<Superoperator> {
    let basis = model.basis();
    let mut s = Superoperator::zeros(basis);
    s.add_hamiltonian(model.hamiltonian());
    if let Some(extra) = extra_hamiltonian {
        extra.ensure_basis(basis)?;
        extra.check_hermitian()?;
        s.add_hamiltonian(extra);
    }
    for j in model.jumps() {
        s.add_jump(j.from, j.to, j.rate);
    }
    for p in model.dephasings() {
        s.add_dephasing(p.state, p.rate);
    }
    Ok(s)
}
