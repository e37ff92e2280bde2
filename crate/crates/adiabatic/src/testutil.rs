use hfine_lindblad::{CMatrix, Complex64, ElectronBasis, ElectronModel, JumpChannel, Operator};

/// Resonantly driven, radiatively damped spin-1/2 and its `S_z`.
pub(crate) fn driven_spin(rabi: f64, gamma: f64) -> (ElectronModel, Operator) {
    let b = ElectronBasis::new(["dn", "up"]).unwrap();
    let c = |x: f64| Complex64::new(x, 0.0);
    let h = CMatrix::from_row_slice(2, 2, &[c(0.0), c(rabi / 2.0), c(rabi / 2.0), c(0.0)]);
    let model =
        ElectronModel::new(Operator::hermitian(b.clone(), h).unwrap(), vec![JumpChannel::new(1, 0, gamma)], vec![]).unwrap();
    let sz = Operator::hermitian(b, CMatrix::from_row_slice(2, 2, &[c(-0.5), c(0.0), c(0.0), c(0.5)])).unwrap();
    (model, sz)
}
