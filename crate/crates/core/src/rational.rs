//! Rational functions `num/den` kept in lowest terms with a monic denominator.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, EvalError, Result};
use crate::poly::{gcd, Polynomial};
use crate::scalar::ComplexScalar;

/// Relative remainder tolerance of the Euclidean GCD.
pub const DEFAULT_GCD_TOL: f64 = 1e-10;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalFn {
    num: Polynomial,
    den: Polynomial,
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})/({:?})", self.num.coeffs(), self.den.coeffs())
    }
}

impl RationalFn {
    /// Reduces to lowest terms. Fails on a zero denominator.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        Self::with_tolerance(num, den, DEFAULT_GCD_TOL)
    }

    pub fn with_tolerance(num: Polynomial, den: Polynomial, tol: f64) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = gcd(&num, &den, tol);
        let (num, den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            let (qn, rn) = num.div_rem(&g);
            let (qd, rd) = den.div_rem(&g);
            if rn.norm() <= 1e3 * tol * num.norm() && rd.norm() <= 1e3 * tol * den.norm() {
                (qn, qd)
            } else {
                (num, den)
            }
        };
        let lead = den.leading().unwrap();
        let inv = Complex64::new(1.0, 0.0) / lead;
        Ok(RationalFn {
            num: if lead == Complex64::new(1.0, 0.0) { num } else { num.scale(inv) },
            den: den.monic(),
        })
    }

    /// Caller guarantees lowest terms and a monic denominator.
    pub(crate) fn from_parts_unchecked(num: Polynomial, den: Polynomial) -> Self {
        debug_assert!(den.leading() == Some(Complex64::new(1.0, 0.0)));
        RationalFn { num, den }
    }

    pub fn zero() -> Self {
        RationalFn {
            num: Polynomial::zero(),
            den: Polynomial::one(),
        }
    }

    pub fn constant(c: ComplexScalar) -> Self {
        RationalFn {
            num: Polynomial::constant(c),
            den: Polynomial::one(),
        }
    }

    pub fn identity() -> Self {
        RationalFn {
            num: Polynomial::identity(),
            den: Polynomial::one(),
        }
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        RationalFn {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_constant(&self) -> Option<ComplexScalar> {
        if self.den.degree() == Some(0) && self.num.degree().unwrap_or(0) == 0 {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn is_identity(&self) -> bool {
        self.den.degree() == Some(0) && self.num == Polynomial::identity()
    }

    /// Value at `z`, or a pole signal when `|den| < 1e−12·(1+|num|)`.
    pub fn eval(&self, z: ComplexScalar) -> std::result::Result<ComplexScalar, EvalError> {
        let n = self.num.eval(z);
        let d = self.den.eval(z);
        if d.norm() < 1e-12 * (1.0 + n.norm()) {
            return Err(EvalError::Pole(z));
        }
        Ok(n / d)
    }

    pub fn derivative(&self) -> Self {
        let top = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let bottom = &self.den * &self.den;
        Self::new(top, bottom).expect("square of a nonzero denominator")
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            return Self::new(&self.num + &other.num, self.den.clone()).unwrap();
        }
        let top = &(&self.num * &other.den) + &(&other.num * &self.den);
        Self::new(top, &self.den * &other.den).unwrap()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.num * &other.num, &self.den * &other.den).unwrap()
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        Self::new(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn powi(&self, n: i32) -> Result<Self> {
        let base = if n < 0 {
            Self::constant(Complex64::new(1.0, 0.0)).div(self)?
        } else {
            self.clone()
        };
        let e = n.unsigned_abs();
        Ok(RationalFn {
            num: base.num.powi(e),
            den: base.den.powi(e),
        })
    }
}
