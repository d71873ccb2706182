//! Complex scalars and the small helpers shared by every numeric module.

use num_complex::Complex64;
use std::f64::consts::TAU;

/// The ambient field. Values stored in expressions and divisors are always finite.
pub type ComplexScalar = Complex64;

/// Shorthand constructor.
#[inline]
pub fn c64(re: f64, im: f64) -> ComplexScalar {
    Complex64::new(re, im)
}

#[inline]
pub fn is_finite(z: ComplexScalar) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Argument normalized to `[0, 2π)`.
pub fn arg_0_2pi(z: ComplexScalar) -> f64 {
    let a = z.im.atan2(z.re);
    if a < 0.0 {
        let shifted = a + TAU;
        // atan2 gives -0.0, and shifts can round to 2π
        if shifted >= TAU {
            0.0
        } else {
            shifted
        }
    } else {
        a
    }
}

/// Total order used for every serialized point list: by modulus, then argument.
pub fn polar_order(a: ComplexScalar, b: ComplexScalar) -> std::cmp::Ordering {
    a.norm()
        .total_cmp(&b.norm())
        .then(arg_0_2pi(a).total_cmp(&arg_0_2pi(b)))
}

/// Radius inside which two numerically computed points are the same point.
#[inline]
pub fn cluster_radius(z: ComplexScalar, relative: f64) -> f64 {
    relative * (1.0 + z.norm())
}

/// `log⁺ x = max(0, log x)`.
#[inline]
pub fn log_plus(x: f64) -> f64 {
    if x > 1.0 {
        x.ln()
    } else {
        0.0
    }
}

/// Sum with a fixed pairwise tree order, so results do not depend on how the
/// caller chunked the input.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Order-independent sum: terms are added in ascending order of value.
pub fn canonical_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.into_iter().collect();
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arg_range() {
        assert_eq!(arg_0_2pi(c64(1.0, 0.0)), 0.0);
        assert!((arg_0_2pi(c64(0.0, -1.0)) - 1.5 * std::f64::consts::PI).abs() < 1e-15);
        assert!(arg_0_2pi(c64(1.0, -1e-300)) < TAU);
    }

    #[test]
    fn polar_order_sorts_by_modulus_first() {
        let mut v = vec![c64(0.0, 3.0), c64(-1.0, 0.0), c64(2.0, 0.0), c64(1.0, 0.0)];
        v.sort_by(|a, b| polar_order(*a, *b));
        assert_eq!(v, vec![c64(1.0, 0.0), c64(-1.0, 0.0), c64(2.0, 0.0), c64(0.0, 3.0)]);
    }

    #[test]
    fn canonical_sum_is_permutation_invariant() {
        let a = [0.1, 1e16, -1e16, 0.3, 0.7];
        let b = [0.7, -1e16, 0.3, 0.1, 1e16];
        assert_eq!(canonical_sum(a).to_bits(), canonical_sum(b).to_bits());
    }
}
