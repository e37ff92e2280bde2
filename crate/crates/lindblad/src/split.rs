use num_complex::Complex64;

use crate::error::Result;
use crate::model::ElectronModel;
use crate::operator::Operator;
use crate::superop::{build_liouvillian, vec_index, Superoperator};

/// Splits the Liouvillian of `model` into a part that is diagonal in the
/// operator basis `|j'⟩⟨j|` and the remainder.
///
/// The diagonal part holds the diagonal Hamiltonian, the level widths and the
/// population refill of pure dephasing; the off-diagonal part holds the
/// off-diagonal Hamiltonian and the population transfer of the jumps.
pub fn split_diag_offdiag(model: &ElectronModel) -> Result<(Superoperator, Superoperator)> {
    let basis = model.basis();
    let d = basis.dim();
    let h = model.hamiltonian();
    let widths = model.level_widths();
    let dephasing = model.dephasing_rates();

    let mut diag = Superoperator::commutator(&h.diagonal_part());
    let gamma = Operator::new(
        basis.clone(),
        nalgebra::DMatrix::from_fn(d, d, |i, j| if i == j { Complex64::new(widths[i], 0.0) } else { Complex64::new(0.0, 0.0) }),
    )?;
    diag.add_anticommutator(&gamma, Complex64::new(-0.5, 0.0))?;
    let mut refill = nalgebra::DMatrix::zeros(d * d, d * d);
    for (s, &g) in dephasing.iter().enumerate() {
        let k = vec_index(d, s, s);
        refill[(k, k)] += Complex64::new(2.0 * g, 0.0);
    }
    let dissipative = model.is_dissipative();
    let diag = Superoperator::new(basis.clone(), diag.matrix() + refill, dissipative)?;

    let mut off = Superoperator::commutator(&h.offdiagonal_part()).matrix().clone();
    for j in model.jumps() {
        off[(vec_index(d, j.to, j.to), vec_index(d, j.from, j.from))] += Complex64::new(j.rate, 0.0);
    }
    let off = Superoperator::new(basis.clone(), off, false)?;
    debug_assert!({
        let full = build_liouvillian(model, None)?;
        (full.matrix() - diag.matrix() - off.matrix()).iter().all(|z| z.norm() < 1e-12 * full.norm().max(1.0))
    });
    Ok((diag, off))
}
