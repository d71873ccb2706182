//! Exponential-sum normal form `Σ L_k(z)·exp(K_k(z))`.
//!
//! `L_k` are Laurent polynomials and the keys `K_k` are Laurent polynomials
//! without constant term, pairwise distinct. Every coefficient carries the
//! total magnitude of the products summed into it, so cancellation can be
//! judged relative to the size of what cancelled.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{MeroExpr, Node};
use crate::laurent::LaurentPolynomial;
use crate::scalar::ComplexScalar;

const KEY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Default)]
struct Tracked {
    terms: BTreeMap<i32, (ComplexScalar, f64)>,
}

impl Tracked {
    fn from_laurent(l: &LaurentPolynomial) -> Self {
        Tracked {
            terms: l.terms().map(|(k, c)| (k, (c, c.norm()))).collect(),
        }
    }

    fn constant(c: ComplexScalar) -> Self {
        let mut t = Tracked::default();
        t.terms.insert(0, (c, c.norm()));
        t
    }

    fn accumulate(&mut self, k: i32, v: ComplexScalar, mag: f64) {
        let e = self.terms.entry(k).or_insert((Complex64::new(0.0, 0.0), 0.0));
        e.0 += v;
        e.1 += mag;
    }

    fn add_assign(&mut self, other: &Tracked, sign: f64) {
        for (&k, &(v, m)) in &other.terms {
            self.accumulate(k, v * sign, m);
        }
    }

    fn mul(&self, other: &Tracked) -> Tracked {
        let mut out = Tracked::default();
        for (&i, &(a, ma)) in &self.terms {
            for (&j, &(b, mb)) in &other.terms {
                out.accumulate(i + j, a * b, ma * mb);
            }
        }
        out
    }

    fn derivative(&self) -> Tracked {
        let mut out = Tracked::default();
        for (&k, &(v, m)) in &self.terms {
            if k != 0 {
                out.accumulate(k - 1, v * k as f64, m * (k as f64).abs());
            }
        }
        out
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.terms.values().all(|(v, m)| v.norm() <= tol * m)
    }

    fn cleaned(&self, tol: f64) -> LaurentPolynomial {
        LaurentPolynomial::from_terms(
            self.terms
                .iter()
                .filter(|(_, (v, m))| v.norm() > tol * m)
                .map(|(k, (v, _))| (*k, *v)),
        )
    }

    fn support(&self) -> usize {
        self.terms.len()
    }
}

#[derive(Clone, Debug)]
struct Term {
    key: LaurentPolynomial,
    coeff: Tracked,
}

fn keys_match(a: &LaurentPolynomial, b: &LaurentPolynomial) -> bool {
    let ka: Vec<_> = a.terms().collect();
    let kb: Vec<_> = b.terms().collect();
    ka.len() == kb.len()
        && ka
            .iter()
            .zip(&kb)
            .all(|((i, x), (j, y))| i == j && (x - y).norm() <= KEY_TOL * (1.0 + x.norm()))
}

#[derive(Clone, Debug, Default)]
pub struct ExpSum {
    terms: Vec<Term>,
}

impl ExpSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn laurent(l: &LaurentPolynomial) -> Self {
        ExpSum {
            terms: vec![Term {
                key: LaurentPolynomial::zero(),
                coeff: Tracked::from_laurent(l),
            }],
        }
    }

    pub fn constant(c: ComplexScalar) -> Self {
        Self::laurent(&LaurentPolynomial::constant(c))
    }

    /// `exp(q)`, with `exp(q₀)` moved into the coefficient.
    pub fn exp(q: &LaurentPolynomial) -> Self {
        ExpSum {
            terms: vec![Term {
                key: q.without_constant(),
                coeff: Tracked::constant(q.constant_term().exp()),
            }],
        }
    }

    fn insert(&mut self, key: &LaurentPolynomial, coeff: &Tracked, sign: f64) {
        match self.terms.iter_mut().find(|t| keys_match(&t.key, key)) {
            Some(t) => t.coeff.add_assign(coeff, sign),
            None => {
                let mut c = Tracked::default();
                c.add_assign(coeff, sign);
                self.terms.push(Term {
                    key: key.clone(),
                    coeff: c,
                });
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for t in &other.terms {
            out.insert(&t.key, &t.coeff, 1.0);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for t in &other.terms {
            out.insert(&t.key, &t.coeff, -1.0);
        }
        out
    }

    pub fn neg(&self) -> Self {
        ExpSum::zero().sub(self)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = ExpSum::zero();
        for a in &self.terms {
            for b in &other.terms {
                out.insert(&(&a.key + &b.key), &a.coeff.mul(&b.coeff), 1.0);
            }
        }
        out
    }

    /// `Σ (L_k' + L_k·K_k')·exp(K_k)`.
    pub fn derivative(&self) -> Self {
        let mut out = ExpSum::zero();
        for t in &self.terms {
            let mut c = t.coeff.derivative();
            c.add_assign(&t.coeff.mul(&Tracked::from_laurent(&t.key.derivative())), 1.0);
            out.insert(&t.key, &c, 1.0);
        }
        out
    }

    /// Every coefficient cancelled to within `tol` of its magnitude.
    pub fn is_negligible(&self, tol: f64) -> bool {
        self.terms.iter().all(|t| t.coeff.is_negligible(tol))
    }

    /// `(key, coefficient)` pairs with cancelled coefficients dropped.
    pub fn components(&self, tol: f64) -> Vec<(LaurentPolynomial, LaurentPolynomial)> {
        self.terms
            .iter()
            .map(|t| (t.key.clone(), t.coeff.cleaned(tol)))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    /// Number of `z^j·exp(K)` products in the sum.
    pub fn size(&self) -> usize {
        self.terms.iter().map(|t| t.coeff.support()).sum()
    }

    pub fn eval(&self, z: ComplexScalar) -> ComplexScalar {
        self.terms
            .iter()
            .map(|t| {
                let c = t.coeff.cleaned(0.0).eval(z);
                if t.key.is_zero() {
                    c
                } else {
                    c * t.key.eval(z).exp()
                }
            })
            .sum()
    }

    fn is_exact_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms[0].key.is_zero()
            && self.terms[0].coeff.terms.len() == 1
            && self.terms[0].coeff.terms.get(&0).map(|e| e.0) == Some(Complex64::new(1.0, 0.0))
    }
}

/// `num/den` with both parts exponential sums.
#[derive(Clone, Debug)]
pub struct ExpFraction {
    pub num: ExpSum,
    pub den: ExpSum,
}

impl ExpFraction {
    fn whole(num: ExpSum) -> Self {
        ExpFraction {
            num,
            den: ExpSum::constant(Complex64::new(1.0, 0.0)),
        }
    }

    fn size(&self) -> usize {
        self.num.size() + self.den.size()
    }
}

fn times(a: &ExpSum, b: &ExpSum) -> ExpSum {
    if a.is_exact_one() {
        b.clone()
    } else if b.is_exact_one() {
        a.clone()
    } else {
        a.mul(b)
    }
}

pub(super) fn to_fraction(e: &MeroExpr, cap: usize) -> Option<ExpFraction> {
    let out = match e.node() {
        Node::Const(c) => ExpFraction::whole(ExpSum::constant(*c)),
        Node::Var => ExpFraction::whole(ExpSum::laurent(&LaurentPolynomial::monomial(
            Complex64::new(1.0, 0.0),
            1,
        ))),
        Node::Rational(r) => ExpFraction {
            num: ExpSum::laurent(&LaurentPolynomial::from_polynomial(r.num())),
            den: ExpSum::laurent(&LaurentPolynomial::from_polynomial(r.den())),
        },
        Node::Exp(q) => ExpFraction::whole(ExpSum::exp(q)),
        Node::Add(a, b) | Node::Sub(a, b) => {
            let (x, y) = (to_fraction(a, cap)?, to_fraction(b, cap)?);
            let sign_sub = matches!(e.node(), Node::Sub(..));
            if x.den.is_exact_one() && y.den.is_exact_one() {
                let num = if sign_sub { x.num.sub(&y.num) } else { x.num.add(&y.num) };
                ExpFraction::whole(num)
            } else {
                let l = times(&x.num, &y.den);
                let r = times(&y.num, &x.den);
                ExpFraction {
                    num: if sign_sub { l.sub(&r) } else { l.add(&r) },
                    den: times(&x.den, &y.den),
                }
            }
        }
        Node::Mul(a, b) => {
            let (x, y) = (to_fraction(a, cap)?, to_fraction(b, cap)?);
            ExpFraction {
                num: times(&x.num, &y.num),
                den: times(&x.den, &y.den),
            }
        }
        Node::Div(a, b) => {
            let (x, y) = (to_fraction(a, cap)?, to_fraction(b, cap)?);
            ExpFraction {
                num: times(&x.num, &y.den),
                den: times(&x.den, &y.num),
            }
        }
        Node::Neg(a) => {
            let x = to_fraction(a, cap)?;
            ExpFraction {
                num: x.num.neg(),
                den: x.den,
            }
        }
    };
    (out.size() <= cap).then_some(out)
}
