use std::fmt::Write as _;

use crate::error::{BathError, Result};

/// Probability masses on a sorted grid of nuclear fields (rad/μs).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDistribution {
    h: Vec<f64>,
    prob: Vec<f64>,
}

impl FieldDistribution {
    /// Normalizes `weights`; the grid must be strictly increasing.
    pub fn new(h: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if h.len() != weights.len() || h.is_empty() {
            return Err(BathError::InvalidParams("grid and weights differ in length or are empty".into()));
        }
        if h.windows(2).any(|w| !(w[1] > w[0])) || h.iter().any(|x| !x.is_finite()) {
            return Err(BathError::InvalidParams("field grid must be finite and strictly increasing".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(BathError::InvalidParams("weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(BathError::InvalidParams("weights sum to zero".into()));
        }
        let prob = weights.iter().map(|w| w / total).collect();
        Ok(Self { h, prob })
    }

    /// Groups equal fields (within `tol`) and sums their weights.
    pub fn from_samples(mut samples: Vec<(f64, f64)>, tol: f64) -> Result<Self> {
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut h: Vec<f64> = Vec::new();
        let mut w: Vec<f64> = Vec::new();
        for (x, p) in samples {
            match h.last() {
                Some(&last) if (x - last).abs() <= tol => *w.last_mut().unwrap() += p,
                _ => {
                    h.push(x);
                    w.push(p);
                }
            }
        }
        Self::new(h, w)
    }

    pub fn grid(&self) -> &[f64] {
        &self.h
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.prob
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.h.iter().zip(&self.prob).map(|(h, p)| h * p).sum()
    }

    pub fn sigma(&self) -> f64 {
        let m = self.mean();
        let var: f64 = self.h.iter().zip(&self.prob).map(|(h, p)| (h - m) * (h - m) * p).sum();
        var.max(0.0).sqrt()
    }

    /// Probability at the grid point nearest `h`.
    pub fn at(&self, h: f64) -> f64 {
        let i = self.h.partition_point(|&x| x < h);
        let pick = match (i.checked_sub(1), self.h.get(i)) {
            (Some(j), Some(&x)) => {
                if (x - h).abs() < (h - self.h[j]).abs() {
                    i
                } else {
                    j
                }
            }
            (Some(j), None) => j,
            (None, _) => 0,
        };
        self.prob[pick]
    }

    /// Total-variation distance to a distribution on the same lattice; grid
    /// points present in only one of the two count with zero on the other side.
    pub fn total_variation(&self, other: &Self, tol: f64) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < self.len() || j < other.len() {
            let a = self.h.get(i).copied().unwrap_or(f64::INFINITY);
            let b = other.h.get(j).copied().unwrap_or(f64::INFINITY);
            if (a - b).abs() <= tol {
                acc += (self.prob[i] - other.prob[j]).abs();
                i += 1;
                j += 1;
            } else if a < b {
                acc += self.prob[i];
                i += 1;
            } else {
                acc += other.prob[j];
                j += 1;
            }
        }
        0.5 * acc
    }

    /// `h,probability` rows with a `#` comment header.
    pub fn to_csv(&self, header: &[String]) -> String {
        let mut s = String::new();
        for line in header {
            let _ = writeln!(s, "# {line}");
        }
        s.push_str("h_rad_per_us,probability\n");
        for (h, p) in self.h.iter().zip(&self.prob) {
            let _ = writeln!(s, "{h:.12e},{p:.12e}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_of_two_points() {
        let d = FieldDistribution::new(vec![-1.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(d.mean(), 0.0);
        assert_eq!(d.sigma(), 1.0);
        assert!((d.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn samples_merge() {
        let d = FieldDistribution::from_samples(vec![(1.0, 1.0), (0.0, 2.0), (1.0 + 1e-12, 1.0)], 1e-9).unwrap();
        assert_eq!(d.grid(), &[0.0, 1.0]);
        assert_eq!(d.probabilities(), &[0.5, 0.5]);
    }

    #[test]
    fn tv_handles_disjoint_support() {
        let a = FieldDistribution::new(vec![0.0], vec![1.0]).unwrap();
        let b = FieldDistribution::new(vec![1.0], vec![1.0]).unwrap();
        assert_eq!(a.total_variation(&b, 1e-9), 1.0);
        assert_eq!(a.total_variation(&a, 1e-9), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(FieldDistribution::new(vec![1.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(FieldDistribution::new(vec![0.0], vec![-1.0]).is_err());
        assert!(FieldDistribution::new(vec![0.0], vec![0.0]).is_err());
    }

    #[test]
    fn nearest_lookup() {
        let d = FieldDistribution::new(vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 1.0]).unwrap();
        assert_eq!(d.at(0.9), 0.5);
        assert_eq!(d.at(-5.0), 0.25);
        assert_eq!(d.at(7.0), 0.25);
    }
}
