use std::collections::HashSet;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{LindbladError, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Largest supported electron dimension.
pub const MAX_DIM: usize = 64;

const HERMITIAN_TOL: f64 = 1e-12;
const DENSITY_TOL: f64 = 1e-10;
const MIN_EIGENVALUE: f64 = -1e-8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElectronBasis {
    labels: Vec<String>,
}

impl ElectronBasis {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Arc<Self>> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(LindbladError::InvalidBasis("empty basis".into()));
        }
        if labels.len() > MAX_DIM {
            return Err(LindbladError::DimensionTooLarge { dim: labels.len(), max: MAX_DIM });
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(LindbladError::InvalidBasis(format!("duplicate label '{l}'")));
            }
        }
        Ok(Arc::new(Self { labels }))
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Max-abs deviation from Hermiticity.
pub(crate) fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

/// A `d x d` complex matrix tied to a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    basis: Arc<ElectronBasis>,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(basis: Arc<ElectronBasis>, matrix: CMatrix) -> Result<Self> {
        let d = basis.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(LindbladError::ShapeMismatch { rows: matrix.nrows(), cols: matrix.ncols(), dim: d });
        }
        Ok(Self { basis, matrix })
    }

    /// Like [`Operator::new`] but also verifies Hermiticity to a relative 1e-12.
    pub fn hermitian(basis: Arc<ElectronBasis>, matrix: CMatrix) -> Result<Self> {
        let op = Self::new(basis, matrix)?;
        op.check_hermitian()?;
        Ok(op)
    }

    pub fn zeros(basis: &Arc<ElectronBasis>) -> Self {
        let d = basis.dim();
        Self { basis: basis.clone(), matrix: CMatrix::zeros(d, d) }
    }

    pub fn identity(basis: &Arc<ElectronBasis>) -> Self {
        let d = basis.dim();
        Self { basis: basis.clone(), matrix: CMatrix::identity(d, d) }
    }

    /// `|to⟩⟨from|`.
    pub fn transition(basis: &Arc<ElectronBasis>, to: usize, from: usize) -> Self {
        let mut op = Self::zeros(basis);
        op.matrix[(to, from)] = Complex64::new(1.0, 0.0);
        op
    }

    pub fn projector(basis: &Arc<ElectronBasis>, state: usize) -> Self {
        Self::transition(basis, state, state)
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

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.matrix[(row, col)] = value;
    }

    pub fn same_basis(&self, other: &Operator) -> bool {
        Arc::ptr_eq(&self.basis, &other.basis) || self.basis == other.basis
    }

    pub fn ensure_basis(&self, basis: &ElectronBasis) -> Result<()> {
        if *self.basis == *basis {
            Ok(())
        } else {
            Err(LindbladError::BasisMismatch)
        }
    }

    pub fn dagger(&self) -> Self {
        Self { basis: self.basis.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { basis: self.basis.clone(), matrix: &self.matrix * c }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.matrix)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= HERMITIAN_TOL * max_abs(&self.matrix).max(1.0)
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let deviation = self.hermitian_deviation();
        if deviation <= HERMITIAN_TOL * max_abs(&self.matrix).max(1.0) {
            Ok(())
        } else {
            Err(LindbladError::NonHermitian { deviation })
        }
    }

    /// Diagonal part of the matrix (off-diagonal entries zeroed).
    pub fn diagonal_part(&self) -> Self {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = self.matrix[(i, i)];
        }
        Self { basis: self.basis.clone(), matrix: m }
    }

    pub fn offdiagonal_part(&self) -> Self {
        let mut m = self.matrix.clone();
        for i in 0..self.dim() {
            m[(i, i)] = Complex64::new(0.0, 0.0);
        }
        Self { basis: self.basis.clone(), matrix: m }
    }

    /// `Tr(self · rho)`.
    pub fn expectation(&self, rho: &DensityMatrix) -> Complex64 {
        trace_of_product(&self.matrix, rho.matrix())
    }
}

/// `Tr(A B)` without forming the product.
pub(crate) fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

fn assert_same(a: &Operator, b: &Operator) {
    assert!(a.same_basis(b), "operator basis mismatch");
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_same(self, rhs);
        Operator { basis: self.basis.clone(), matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_same(self, rhs);
        Operator { basis: self.basis.clone(), matrix: &self.matrix - &rhs.matrix }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_same(self, rhs);
        Operator { basis: self.basis.clone(), matrix: &self.matrix * &rhs.matrix }
    }
}

/// Unit-trace, Hermitian, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Operator);

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        let tr = op.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(LindbladError::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let dev = op.hermitian_deviation();
        if dev > DENSITY_TOL {
            return Err(LindbladError::InvalidDensityMatrix(format!("Hermiticity deviation {dev:.3e}")));
        }
        let min = min_eigenvalue(op.matrix());
        if min < MIN_EIGENVALUE {
            return Err(LindbladError::InvalidDensityMatrix(format!("eigenvalue {min:.3e}")));
        }
        Ok(Self(op))
    }

    /// Pure state `|i⟩⟨i|`.
    pub fn basis_state(basis: &Arc<ElectronBasis>, i: usize) -> Self {
        Self(Operator::projector(basis, i))
    }

    /// Symmetrizes `op` before validating; absorbs round-off from linear solves.
    pub(crate) fn from_hermitized(op: Operator) -> Result<Self> {
        let m = op.matrix();
        let h = (m + m.adjoint()).scale(0.5);
        Self::new(Operator { basis: op.basis.clone(), matrix: h })
    }

    pub fn as_operator(&self) -> &Operator {
        &self.0
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }

    pub fn basis(&self) -> &Arc<ElectronBasis> {
        self.0.basis()
    }

    pub fn population(&self, i: usize) -> f64 {
        self.0.get(i, i).re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.0.dim()).map(|i| self.population(i)).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(self.0.matrix())
    }
}

pub(crate) fn min_eigenvalue(m: &CMatrix) -> f64 {
    let h = (m + m.adjoint()).scale(0.5);
    h.symmetric_eigenvalues().iter().fold(f64::INFINITY, |a, &v| a.min(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_rejects_duplicates_and_oversize() {
        assert!(ElectronBasis::new(["g", "e", "g"]).is_err());
        assert!(ElectronBasis::new(Vec::<String>::new()).is_err());
        let big: Vec<String> = (0..65).map(|i| format!("s{i}")).collect();
        assert!(matches!(ElectronBasis::new(big), Err(LindbladError::DimensionTooLarge { .. })));
        let b = ElectronBasis::new(["g", "e"]).unwrap();
        assert_eq!(b.index_of("e"), Some(1));
    }

    #[test]
    fn hermitian_check() {
        let b = ElectronBasis::new(["g", "e"]).unwrap();
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        assert!(Operator::hermitian(b.clone(), m).is_ok());
        let bad = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(2.0, 0.0)]);
        assert!(matches!(Operator::hermitian(b, bad), Err(LindbladError::NonHermitian { .. })));
    }

    #[test]
    fn density_matrix_validation() {
        let b = ElectronBasis::new(["g", "e"]).unwrap();
        let rho = DensityMatrix::basis_state(&b, 0);
        assert_eq!(rho.population(0), 1.0);
        let neg = CMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
        assert!(DensityMatrix::new(Operator::new(b.clone(), neg).unwrap()).is_err());
        let half = Operator::identity(&b).scale_re(0.5);
        let rho = DensityMatrix::new(half).unwrap();
        let sz = Operator::new(
            b.clone(),
            CMatrix::from_row_slice(2, 2, &[c(-0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]),
        )
        .unwrap();
        assert!(sz.expectation(&rho).norm() < 1e-15);
    }

    #[test]
    fn split_parts_recombine() {
        let b = ElectronBasis::new(["a", "b", "c"]).unwrap();
        let m = CMatrix::from_fn(3, 3, |i, j| c(i as f64 + 1.0, j as f64));
        let op = Operator::new(b, m).unwrap();
        let sum = &op.diagonal_part() + &op.offdiagonal_part();
        assert_eq!(sum, op);
    }
}
