//! Run-wide numeric settings and radius schedules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative stopping threshold of circle quadrature.
    pub quad: f64,
    /// Relative coefficient tolerance of identity tests.
    pub identity: f64,
    /// Merge radius of numerically coincident points, relative to `1+|z|`.
    pub clustering: f64,
    /// Minimal distance of contours from zeros and poles, relative to `1+|z|`.
    pub clearance: f64,
    /// Remainder tolerance of the polynomial GCD.
    pub gcd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quad: 1e-9,
            identity: 1e-10,
            clustering: 1e-7,
            clearance: 1e-6,
            gcd: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    /// Outer radius of the base annulus; `f64::INFINITY` for the punctured plane.
    pub r0: f64,
    pub tol: Tolerances,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            r0: f64::INFINITY,
            tol: Tolerances::default(),
            seed: 0,
        }
    }
}

impl Settings {
    /// Fails unless `1 < r < R₀`.
    pub fn check_radius(&self, r: f64) -> Result<()> {
        if r > 1.0 && r < self.r0 && r.is_finite() {
            Ok(())
        } else {
            Err(Error::RadiusOutOfRange {
                radius: r,
                min: 1.0,
                max: self.r0,
            })
        }
    }

    /// Fails unless `radii` is nonempty, strictly increasing and inside `(1, R₀)`.
    pub fn check_radii(&self, radii: &[f64]) -> Result<()> {
        if radii.is_empty() {
            return Err(Error::Precondition("no radii given".into()));
        }
        if !radii.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Precondition("radii must be strictly increasing".into()));
        }
        radii.iter().try_for_each(|&r| self.check_radius(r))
    }
}

/// `n` radii spaced geometrically from `a` to `b` inclusive.
pub fn geometric_radii(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let (la, lb) = (a.ln(), b.ln());
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        b
                    } else {
                        (la + (lb - la) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// `R₀ − (R₀−1)·2^(−j)` for `j = 1..=n`, accumulating at a finite `R₀`.
pub fn finite_radii(r0: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|j| r0 - (r0 - 1.0) * 0.5f64.powi(j as i32)).collect()
}

/// `r·(1 + k·step)`, the k-th outward nudge of a contour radius.
pub fn jittered_radius(r: f64, k: u32, step: f64) -> f64 {
    r * (1.0 + k as f64 * step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_schedule_hits_endpoints() {
        let r = geometric_radii(2.0, 50.0, 12);
        assert_eq!(r.len(), 12);
        assert_eq!(r[0], 2.0);
        assert_eq!(r[11], 50.0);
        assert!(r.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn finite_schedule_accumulates() {
        let r = finite_radii(3.0, 4);
        assert_eq!(r, vec![2.0, 2.5, 2.75, 2.875]);
    }

    #[test]
    fn radius_range() {
        let s = Settings { r0: 3.0, ..Settings::default() };
        assert!(s.check_radius(2.0).is_ok());
        assert!(s.check_radius(3.0).is_err());
        assert!(s.check_radius(1.0).is_err());
    }
}
