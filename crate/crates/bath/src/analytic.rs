use crate::distribution::FieldDistribution;
use crate::error::{BathError, Result};
use crate::params::NarrowingParams;

const SPAN: f64 = 6.0;
const GROWTH: f64 = 1.02;

/// Unnormalized `(1 + R/(R+Γ) δ_0²/(h²+δ_s²)) e^{−h²/2σ_eq²}`.
pub fn narrowed_density(params: &NarrowingParams, h: f64) -> f64 {
    let sigma = params.sigma_eq();
    let gauss = (-h * h / (2.0 * sigma * sigma)).exp();
    let r = params.flip_rate;
    if r == 0.0 || params.delta0 == 0.0 {
        return gauss;
    }
    let ds = params.delta_s();
    let weight = r / (r + params.gamma_dep());
    (1.0 + weight * params.delta0 * params.delta0 / (h * h + ds * ds)) * gauss
}

/// Continuum form evaluated on a given lattice and normalized there.
pub fn analytic_on_grid(params: &NarrowingParams, grid: &[f64]) -> Result<FieldDistribution> {
    check(params)?;
    FieldDistribution::new(grid.to_vec(), grid.iter().map(|&h| narrowed_density(params, h)).collect())
}

fn check(params: &NarrowingParams) -> Result<()> {
    params.validate()?;
    if params.flip_rate > 0.0 && params.delta0 > 0.0 && params.delta_s() == 0.0 {
        return Err(BathError::GridResolution("delta_s vanishes while R > 0, so the peak is a delta function".into()));
    }
    Ok(())
}

/// Symmetric grid over `±6σ_eq`: step `min(δ_s, σ_eq)/10` at the origin,
/// growing geometrically to at most `σ_eq/100`.
pub fn adaptive_grid(sigma_eq: f64, delta_s: f64) -> Vec<f64> {
    refined_grid(0.0, SPAN * sigma_eq, delta_s.min(sigma_eq) / 10.0, sigma_eq / 100.0)
}

/// Grid over `center ± half_span` with step `fine` at the center, growing by
/// 2% per point up to `coarse`.
pub fn refined_grid(center: f64, half_span: f64, fine: f64, coarse: f64) -> Vec<f64> {
    let mut half = vec![0.0];
    let mut step = fine.min(coarse);
    let mut x = 0.0;
    while x < half_span {
        x = (x + step).min(half_span);
        half.push(x);
        step = (step * GROWTH).min(coarse);
    }
    let mut grid: Vec<f64> = half.iter().skip(1).rev().map(|x| center - x).collect();
    grid.extend(half.iter().map(|x| center + x));
    grid
}

fn trapezoid_masses(grid: &[f64], mut density: impl FnMut(f64) -> f64) -> Vec<f64> {
    let n = grid.len();
    (0..n)
        .map(|i| {
            let left = if i == 0 { grid[0] } else { grid[i - 1] };
            let right = if i + 1 == n { grid[n - 1] } else { grid[i + 1] };
            density(grid[i]) * 0.5 * (right - left)
        })
        .collect()
}

/// Large-bath limit of the birth–death chain with per-spin rate `λ(h)`:
/// density `e^{−h²/2σ_eq²}/λ(h)` as trapezoid masses on `grid`.
pub fn continuum_with_rate(sigma_eq: f64, grid: &[f64], rate: impl Fn(f64) -> f64) -> Result<FieldDistribution> {
    if !(sigma_eq > 0.0) {
        return Err(BathError::InvalidParams("sigma_eq must be positive".into()));
    }
    let mut bad = None;
    let masses = trapezoid_masses(grid, |h| {
        let r = rate(h);
        if !(r > 0.0) || !r.is_finite() {
            bad.get_or_insert((h, r));
            return 0.0;
        }
        (-h * h / (2.0 * sigma_eq * sigma_eq)).exp() / r
    });
    if let Some((field, rate)) = bad {
        return Err(BathError::BadRate { field, rate });
    }
    FieldDistribution::new(grid.to_vec(), masses)
}

/// Trapezoid cell masses of the continuum density on the adaptive grid.
pub fn analytic_distribution(params: &NarrowingParams) -> Result<FieldDistribution> {
    check(params)?;
    let sigma = params.sigma_eq();
    let ds = if params.flip_rate > 0.0 && params.delta0 > 0.0 { params.delta_s() } else { sigma };
    let grid = adaptive_grid(sigma, ds);
    let weights = trapezoid_masses(&grid, |h| narrowed_density(params, h));
    FieldDistribution::new(grid, weights)
}
