//! Dense univariate polynomials over ℂ, lowest degree first.
//!
//! Sums and products zero out any coefficient whose magnitude is within
//! rounding of the operands that produced it, so exact cancellations stay
//! exact and do not leave `1e-17` leading coefficients behind.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::scalar::ComplexScalar;

const CANCEL_ULPS: f64 = 8.0 * f64::EPSILON;

#[derive(Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<ComplexScalar>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial{:?}", self.coeffs)
    }
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<ComplexScalar>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: ComplexScalar) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `z`.
    pub fn identity() -> Self {
        Self::monomial(Complex64::new(1.0, 0.0), 1)
    }

    pub fn monomial(c: ComplexScalar, degree: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    /// `∏ (z − a)^m` over the given roots.
    pub fn from_roots(roots: &[(ComplexScalar, usize)]) -> Self {
        let mut p = Self::one();
        for &(a, m) in roots {
            let factor = Self::new(vec![-a, Complex64::new(1.0, 0.0)]);
            for _ in 0..m {
                p = &p * &factor;
            }
        }
        p
    }

    pub fn coeffs(&self) -> &[ComplexScalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<ComplexScalar> {
        self.coeffs.last().copied()
    }

    pub fn coeff(&self, k: usize) -> ComplexScalar {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Index of the lowest nonzero coefficient (the order of the root at 0).
    pub fn low_order(&self) -> usize {
        self.coeffs.iter().take_while(|c| **c == Complex64::new(0.0, 0.0)).count()
    }

    pub fn eval(&self, z: ComplexScalar) -> ComplexScalar {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Value together with the running bound `Σ |a_k| |z|^k` used for
    /// rounding-error estimates.
    pub fn eval_with_bound(&self, z: ComplexScalar) -> (ComplexScalar, f64) {
        let r = z.norm();
        let mut v = Complex64::new(0.0, 0.0);
        let mut b = 0.0;
        for c in self.coeffs.iter().rev() {
            v = v * z + c;
            b = b * r + c.norm();
        }
        (v, b)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn scale(&self, c: ComplexScalar) -> Self {
        if c == Complex64::new(0.0, 0.0) {
            return Self::zero();
        }
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Divides by the leading coefficient. The zero polynomial stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) if l == Complex64::new(1.0, 0.0) => self.clone(),
            Some(l) => {
                let mut coeffs: Vec<_> = self.coeffs.iter().map(|a| a / l).collect();
                *coeffs.last_mut().unwrap() = Complex64::new(1.0, 0.0);
                Self::new(coeffs)
            }
        }
    }

    /// Multiplies by `z^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k];
        coeffs.extend_from_slice(&self.coeffs);
        Self::new(coeffs)
    }

    /// Divides by `z^k`; the caller guarantees `k ≤ low_order()`.
    pub fn shift_down(&self, k: usize) -> Self {
        debug_assert!(k <= self.low_order() || self.is_zero());
        Self::new(self.coeffs.iter().skip(k).copied().collect())
    }

    /// Long division. The divisor must be nonzero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dlen = divisor.coeffs.len();
        assert!(dlen > 0, "polynomial division by zero");
        if self.coeffs.len() < dlen {
            return (Self::zero(), self.clone());
        }
        let lead = divisor.coeffs[dlen - 1];
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Complex64::new(0.0, 0.0); rem.len() - dlen + 1];
        for i in (0..quot.len()).rev() {
            let q = rem[i + dlen - 1] / lead;
            quot[i] = q;
            rem[i + dlen - 1] = Complex64::new(0.0, 0.0);
            for j in 0..dlen - 1 {
                let before = rem[i + j];
                let t = q * divisor.coeffs[j];
                let after = before - t;
                rem[i + j] = cancel(after, before.norm() + t.norm());
            }
        }
        rem.truncate(dlen - 1);
        (Self::new(quot), Self::new(rem))
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Drops leading coefficients that are below `rel · norm`.
    pub fn trim_relative(&self, rel: f64) -> Self {
        let cutoff = rel * self.norm();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= cutoff) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }
}

#[inline]
fn cancel(value: ComplexScalar, magnitude: f64) -> ComplexScalar {
    if value.norm() <= CANCEL_ULPS * magnitude {
        Complex64::new(0.0, 0.0)
    } else {
        value
    }
}

fn add_impl(a: &Polynomial, b: &Polynomial, sign: f64) -> Polynomial {
    let n = a.coeffs.len().max(b.coeffs.len());
    let coeffs = (0..n)
        .map(|k| {
            let x = a.coeff(k);
            let y = b.coeff(k) * sign;
            cancel(x + y, x.norm() + y.norm())
        })
        .collect();
    Polynomial::new(coeffs)
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        add_impl(self, rhs, 1.0)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        add_impl(self, rhs, -1.0)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let n = self.coeffs.len() + rhs.coeffs.len() - 1;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        let mut mag = vec![0.0; n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let t = a * b;
                out[i + j] += t;
                mag[i + j] += t.norm();
            }
        }
        let coeffs = out
            .into_iter()
            .zip(mag)
            .map(|(v, m)| cancel(v, m * (1.0 + n as f64)))
            .collect();
        Polynomial::new(coeffs)
    }
}

/// Monic greatest common divisor by the Euclidean algorithm with a relative
/// remainder tolerance. Returns the constant `1` when the inputs are coprime
/// and the monic normalization of the other argument when one of them is zero.
pub fn gcd(a: &Polynomial, b: &Polynomial, tol: f64) -> Polynomial {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    // common power of z is taken out exactly
    let shift = a.low_order().min(b.low_order());
    let a = a.shift_down(shift);
    let b = b.shift_down(shift);
    let unit = |p: &Polynomial| {
        let n = p.norm();
        p.scale(Complex64::new(1.0 / n, 0.0))
    };
    let (mut u, mut v) = if a.degree() >= b.degree() {
        (unit(&a), unit(&b))
    } else {
        (unit(&b), unit(&a))
    };
    loop {
        if v.degree() == Some(0) {
            return Polynomial::monomial(Complex64::new(1.0, 0.0), shift);
        }
        let (_, r) = u.div_rem(&v);
        let scale = u.norm().max(v.norm());
        if r.is_zero() || r.norm() <= tol * scale {
            return v.monic().shift_up(shift);
        }
        u = v;
        v = unit(&r);
    }
}
