use hfine_lindblad::units::mhz_to_angular;
use hfine_lindblad::Complex64;
use nalgebra::{Matrix3, Vector3};

use crate::error::{NvError, Result};

/// Electron gyromagnetic ratio, rad/(s·T).
pub const ELECTRON_GYROMAGNETIC: f64 = 1.760_859_63e11;
/// ¹³C gyromagnetic ratio, rad/(s·T).
pub const CARBON13_GYROMAGNETIC: f64 = 6.728_284e7;
const MIN_DISTANCE_NM: f64 = 0.05;

/// Orthonormal right-handed nuclear frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub x: Vector3<f64>,
    pub y: Vector3<f64>,
    pub z: Vector3<f64>,
}

/// Quantization frame of a nucleus and its longitudinal coupling `|e_z · A|`.
pub fn local_frame(tensor: &Matrix3<f64>) -> Result<(LocalFrame, f64)> {
    let row: Vector3<f64> = tensor.row(2).transpose();
    let a_z = row.norm();
    if !(a_z > 0.0) || !a_z.is_finite() {
        return Err(NvError::DegenerateTensor);
    }
    let z = row / a_z;
    let mut x = Vector3::x() - z * z.x;
    if x.norm() < 1e-8 {
        x = Vector3::y() - z * z.y;
    }
    let x = x.normalize();
    let y = z.cross(&x);
    Ok((LocalFrame { x, y, z }, a_z))
}

/// Point-dipole hyperfine tensor in MHz for a nucleus at `position_nm`
/// relative to the electron. Gyromagnetic ratios in rad/(s·T).
pub fn dipolar_tensor(position_nm: Vector3<f64>, gamma_e: f64, gamma_n: f64) -> Result<Matrix3<f64>> {
    let r = position_nm.norm();
    if !(r > MIN_DISTANCE_NM) {
        return Err(NvError::OriginCollision { distance_nm: r });
    }
    const MU0_OVER_4PI: f64 = 1e-7;
    const HBAR: f64 = 1.054_571_817e-34;
    // Hz·m³ → MHz·nm³
    let k = MU0_OVER_4PI * gamma_e * gamma_n * HBAR / (2.0 * std::f64::consts::PI) * 1e27 * 1e-6;
    let n = position_nm / r;
    Ok((Matrix3::identity() - 3.0 * n * n.transpose()) * (k / r.powi(3)))
}

/// Transverse amplitudes `A_{α,β}`, first index in the global frame
/// (`±` = `e_x ± i e_y`), second in the local frame (`∓` = `e'_x ∓ i e'_y`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseAmplitudes {
    pub minus_minus: Complex64,
    pub plus_minus: Complex64,
    pub x_minus: Complex64,
    pub y_minus: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CarbonSite {
    /// Hyperfine tensor, rad/μs.
    tensor: Matrix3<f64>,
    frame: LocalFrame,
    a_z: f64,
    amplitudes: TransverseAmplitudes,
}

impl CarbonSite {
    /// From a tensor in MHz.
    pub fn from_mhz(tensor_mhz: Matrix3<f64>) -> Result<Self> {
        Self::new(tensor_mhz.map(mhz_to_angular))
    }

    /// From a tensor in rad/μs.
    pub fn new(tensor: Matrix3<f64>) -> Result<Self> {
        if tensor.iter().any(|v| !v.is_finite()) {
            return Err(NvError::InvalidParams("non-finite hyperfine tensor".into()));
        }
        let (frame, a_z) = local_frame(&tensor)?;
        let c = |v: &Vector3<f64>| v.map(|x| Complex64::new(x, 0.0));
        let i = Complex64::new(0.0, 1.0);
        let t = tensor.map(|x| Complex64::new(x, 0.0));
        let ex = c(&Vector3::x());
        let ey = c(&Vector3::y());
        let local_minus = c(&frame.x) - c(&frame.y) * i;
        let amp = |global: nalgebra::Vector3<Complex64>| (global.transpose() * &t * &local_minus)[(0, 0)];
        let amplitudes = TransverseAmplitudes {
            minus_minus: amp(&ex - &ey * i),
            plus_minus: amp(&ex + &ey * i),
            x_minus: amp(ex.clone()),
            y_minus: amp(ey.clone()),
        };
        Ok(Self { tensor, frame, a_z, amplitudes })
    }

    pub fn tensor(&self) -> &Matrix3<f64> {
        &self.tensor
    }

    pub fn frame(&self) -> &LocalFrame {
        &self.frame
    }

    /// Longitudinal coupling, rad/μs.
    pub fn a_z(&self) -> f64 {
        self.a_z
    }

    pub fn amplitudes(&self) -> &TransverseAmplitudes {
        &self.amplitudes
    }
}

/// Contact couplings of the on-site ¹⁴N, rad/μs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NitrogenSite {
    pub ground: f64,
    pub excited: f64,
}

impl Default for NitrogenSite {
    fn default() -> Self {
        Self { ground: mhz_to_angular(2.2), excited: mhz_to_angular(40.0) }
    }
}

impl NitrogenSite {
    pub fn validate(&self) -> Result<()> {
        if self.ground < 0.0 || self.excited < 0.0 || !self.ground.is_finite() || !self.excited.is_finite() {
            return Err(NvError::InvalidParams("nitrogen couplings must be finite and non-negative".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Rotation3;
    use proptest::prelude::*;

    fn check_frame(f: &LocalFrame) {
        for (a, b) in [(f.x, f.y), (f.y, f.z), (f.z, f.x)] {
            assert!(a.dot(&b).abs() < 1e-12);
        }
        for v in [f.x, f.y, f.z] {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
        assert!((f.x.cross(&f.y) - f.z).norm() < 1e-12);
    }

    #[test]
    fn axial_tensor_keeps_global_frame() {
        let t = Matrix3::from_diagonal(&Vector3::new(0.3, 0.3, 1.2));
        let (f, a_z) = local_frame(&t).unwrap();
        assert!((f.z - Vector3::z()).norm() < 1e-15);
        assert!((f.x - Vector3::x()).norm() < 1e-15);
        assert_eq!(a_z, 1.2);
    }

    #[test]
    fn rotated_about_x() {
        let t = Matrix3::from_diagonal(&Vector3::new(0.3, 0.3, 1.2));
        let r = Rotation3::from_axis_angle(&Vector3::x_axis(), std::f64::consts::FRAC_PI_2);
        // Rotate the nuclear index only; the electron axis stays e_z.
        let rt = t * r.matrix().transpose();
        let (f, a_z) = local_frame(&rt).unwrap();
        assert!((f.z.y.abs() - 1.0).abs() < 1e-12);
        assert!((a_z - 1.2).abs() < 1e-12);
        check_frame(&f);
    }

    #[test]
    fn fallback_when_row_is_along_x() {
        let mut t = Matrix3::zeros();
        t[(2, 0)] = 2.0;
        let (f, a_z) = local_frame(&t).unwrap();
        assert!((f.z - Vector3::x()).norm() < 1e-15);
        assert_eq!(a_z, 2.0);
        check_frame(&f);
    }

    #[test]
    fn degenerate_tensor() {
        let mut t = Matrix3::identity();
        t[(2, 2)] = 0.0;
        assert_eq!(local_frame(&t).unwrap_err(), NvError::DegenerateTensor);
    }

    #[test]
    fn dipolar_symmetry_and_scaling() {
        let on_axis = dipolar_tensor(Vector3::new(0.0, 0.0, 0.5), ELECTRON_GYROMAGNETIC, CARBON13_GYROMAGNETIC).unwrap();
        assert!((on_axis[(2, 2)] + 2.0 * on_axis[(0, 0)]).abs() < 1e-15);
        assert_eq!(on_axis[(0, 0)], on_axis[(1, 1)]);
        // Known prefactor: about 0.0199 MHz nm³ for an electron and a 13C.
        assert!((on_axis[(0, 0)] * 0.125 - 0.01989).abs() < 2e-5, "{}", on_axis[(0, 0)] * 0.125);
        let p = Vector3::new(0.3, -0.2, 0.45);
        let a = dipolar_tensor(p, ELECTRON_GYROMAGNETIC, CARBON13_GYROMAGNETIC).unwrap();
        let b = dipolar_tensor(2.0 * p, ELECTRON_GYROMAGNETIC, CARBON13_GYROMAGNETIC).unwrap();
        assert!((a / 8.0 - b).norm() < 1e-15);
        assert!((a - a.transpose()).norm() < 1e-15);
        assert!(a.trace().abs() < 1e-15);
        assert!(matches!(
            dipolar_tensor(Vector3::new(0.01, 0.0, 0.0), 1.0, 1.0),
            Err(NvError::OriginCollision { .. })
        ));
    }

    #[test]
    fn uniform_tensor_amplitudes() {
        let site = CarbonSite::new(Matrix3::from_diagonal(&Vector3::new(0.4, 0.4, 1.0))).unwrap();
        let a = site.amplitudes();
        assert!(a.minus_minus.norm() < 1e-15);
        assert!((a.plus_minus - Complex64::new(0.8, 0.0)).norm() < 1e-15);
        assert!((a.x_minus - Complex64::new(0.4, 0.0)).norm() < 1e-15);
        assert!((a.y_minus - Complex64::new(0.0, -0.4)).norm() < 1e-15);
    }

    fn tensor_strategy() -> impl Strategy<Value = Matrix3<f64>> {
        prop::array::uniform9(-1.0f64..1.0).prop_map(|v| {
            let m = Matrix3::from_row_slice(&v);
            m * m.transpose() + Matrix3::identity() * 0.1
        })
    }

    proptest! {
        #[test]
        fn frames_are_orthonormal(t in tensor_strategy()) {
            let (f, a_z) = local_frame(&t).unwrap();
            check_frame(&f);
            let row: Vector3<f64> = t.row(2).transpose();
            prop_assert!((a_z - row.norm()).abs() < 1e-12);
        }

        #[test]
        fn longitudinal_coupling_ignores_rotation_about_local_axis(t in tensor_strategy(), angle in 0.0f64..6.28) {
            let (f, a_z) = local_frame(&t).unwrap();
            let r = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(f.z), angle);
            let rotated = t * r.matrix().transpose();
            let (g, b_z) = local_frame(&rotated).unwrap();
            prop_assert!((a_z - b_z).abs() < 1e-12);
            prop_assert!((f.z - g.z).norm() < 1e-12);
        }
    }
}
