//! Conversions into the internal angular unit system (rad/μs).

use std::f64::consts::PI;

/// Ordinary frequency in MHz to angular frequency in rad/μs.
pub fn mhz_to_angular(f_mhz: f64) -> f64 {
    2.0 * PI * f_mhz
}

pub fn angular_to_mhz(w: f64) -> f64 {
    w / (2.0 * PI)
}

/// Rate in 1/ns to 1/μs.
pub fn per_ns_to_per_us(rate: f64) -> f64 {
    rate * 1e3
}

/// Rate in 1/s to 1/μs.
pub fn per_s_to_per_us(rate: f64) -> f64 {
    rate * 1e-6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        assert!((angular_to_mhz(mhz_to_angular(2870.0)) - 2870.0).abs() < 1e-9);
        assert_eq!(per_ns_to_per_us(0.5), 500.0);
        assert!((per_s_to_per_us(2.5e-2) - 2.5e-8).abs() < 1e-20);
    }
}
