//! Laurent polynomials: finitely many integer powers of `z`, negative allowed.
//! `exp` of one of these is holomorphic and zero-free on every annulus.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::poly::Polynomial;
use crate::rational::RationalFn;
use crate::scalar::ComplexScalar;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LaurentPolynomial {
    terms: BTreeMap<i32, ComplexScalar>,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, ComplexScalar)>) -> Self {
        let mut out = Self::zero();
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out
    }

    pub fn monomial(c: ComplexScalar, k: i32) -> Self {
        Self::from_terms([(k, c)])
    }

    pub fn constant(c: ComplexScalar) -> Self {
        Self::monomial(c, 0)
    }

    fn add_term(&mut self, k: i32, c: ComplexScalar) {
        let entry = self.terms.entry(k).or_default();
        let before = *entry;
        *entry += c;
        if entry.norm() <= 8.0 * f64::EPSILON * (before.norm() + c.norm()) {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, ComplexScalar)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: i32) -> ComplexScalar {
        self.terms.get(&k).copied().unwrap_or_default()
    }

    pub fn constant_term(&self) -> ComplexScalar {
        self.coeff(0)
    }

    /// True when only the `z⁰` coefficient may be nonzero.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&k| k == 0)
    }

    pub fn without_constant(&self) -> Self {
        LaurentPolynomial {
            terms: self.terms.iter().filter(|(k, _)| **k != 0).map(|(k, c)| (*k, *c)).collect(),
        }
    }

    pub fn min_power(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_power(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Σ |c_k|·|z|^k`, the scale of rounding errors in [`Self::eval`].
    pub fn eval_abs(&self, z: ComplexScalar) -> f64 {
        let m = z.norm();
        self.terms.iter().map(|(&k, c)| c.norm() * m.powi(k)).sum()
    }

    /// Value at `z`; callers keep `z ≠ 0` whenever negative powers are present.
    pub fn eval(&self, z: ComplexScalar) -> ComplexScalar {
        let Some(lo) = self.min_power() else {
            return Complex64::new(0.0, 0.0);
        };
        let hi = self.max_power().unwrap();
        let mut pos = Complex64::new(0.0, 0.0);
        for k in (0..=hi.max(0)).rev() {
            pos = pos * z + self.coeff(k);
        }
        if lo >= 0 {
            return pos;
        }
        let w = 1.0 / z;
        let mut neg = Complex64::new(0.0, 0.0);
        for k in (1..=-lo).rev() {
            neg = neg * w + self.coeff(-k);
        }
        pos + neg * w
    }

    pub fn derivative(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(k, _)| **k != 0)
                .map(|(k, c)| (k - 1, c * *k as f64)),
        )
    }

    pub fn scale(&self, c: ComplexScalar) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, a)| (*k, a * c)))
    }

    pub fn from_polynomial(p: &Polynomial) -> Self {
        Self::from_terms(p.coeffs().iter().enumerate().map(|(k, c)| (k as i32, *c)))
    }

    /// `num / z^shift` with `num` a polynomial; the exact rational form.
    pub fn to_rational(&self) -> RationalFn {
        let lo = self.min_power().unwrap_or(0).min(0);
        let num = Polynomial::new(
            match self.max_power() {
                None => Vec::new(),
                Some(hi) => (lo..=hi.max(lo)).map(|k| self.coeff(k)).collect(),
            },
        );
        RationalFn::from_parts_unchecked(num, Polynomial::monomial(Complex64::new(1.0, 0.0), (-lo) as usize))
    }

    /// Inverse of [`to_rational`](Self::to_rational): succeeds when the
    /// denominator is a monomial.
    pub fn from_rational(r: &RationalFn) -> Option<Self> {
        let den = r.den();
        let d = den.degree()?;
        if den.low_order() != d {
            return None;
        }
        let inv = 1.0 / den.leading().unwrap();
        Some(Self::from_terms(
            r.num()
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| (k as i32 - d as i32, c * inv)),
        ))
    }
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = self.clone();
        for (k, c) in rhs.terms() {
            out.add_term(k, c);
        }
        out
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = self.clone();
        for (k, c) in rhs.terms() {
            out.add_term(k, -c);
        }
        out
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        LaurentPolynomial {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = LaurentPolynomial::zero();
        for (i, a) in self.terms() {
            for (j, b) in rhs.terms() {
                out.add_term(i + j, a * b);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c64;

    #[test]
    fn eval_with_negative_powers() {
        // z + 1/z + 3/z²
        let q = LaurentPolynomial::from_terms([(1, c64(1.0, 0.0)), (-1, c64(1.0, 0.0)), (-2, c64(3.0, 0.0))]);
        let z = c64(2.0, 0.0);
        assert!((q.eval(z) - c64(2.0 + 0.5 + 0.75, 0.0)).norm() < 1e-15);
        let w = c64(0.3, -1.1);
        let direct = w + 1.0 / w + 3.0 / (w * w);
        assert!((q.eval(w) - direct).norm() < 1e-14);
    }

    #[test]
    fn derivative_rule() {
        let q = LaurentPolynomial::from_terms([(1, c64(1.0, 0.0)), (-1, c64(1.0, 0.0)), (0, c64(5.0, 0.0))]);
        let d = q.derivative();
        assert_eq!(d, LaurentPolynomial::from_terms([(0, c64(1.0, 0.0)), (-2, c64(-1.0, 0.0))]));
    }

    #[test]
    fn rational_round_trip() {
        let q = LaurentPolynomial::from_terms([(2, c64(1.5, 0.0)), (-3, c64(0.0, 2.0))]);
        let r = q.to_rational();
        assert_eq!(LaurentPolynomial::from_rational(&r).unwrap(), q);
    }
}
