//! Meromorphic test functions on the annulus.
//!
//! The class is rational functions, `exp` of Laurent polynomials, and their
//! field combinations. It is closed under differentiation, and every
//! construction the checks need (Möbius transforms, 3×3 determinants,
//! logarithmic derivatives) stays inside it.
//!
//! Expressions are immutable and cheap to clone. The public constructors fold
//! eagerly: Exp-free subtrees collapse into a single rational node, and
//! `exp(p)·exp(q)` becomes `exp(p+q)`. [`MeroExpr::from_node`] builds a node
//! verbatim when an unfolded tree is wanted.

mod canonical;
mod parse;

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

pub use canonical::{ExpFraction, ExpSum};
pub use parse::parse_expression;

use crate::error::{Error, EvalError, Result};
use crate::laurent::LaurentPolynomial;
use crate::rational::RationalFn;
use crate::sample::annulus_points;
use crate::scalar::ComplexScalar;

/// Magnitude beyond which evaluation reports overflow.
pub const OVERFLOW_CAP: f64 = 1e300;
/// Relative tolerance of identity testing.
pub const DEFAULT_IDENTITY_TOL: f64 = 1e-10;
/// Seed of the sampled identity test.
pub const IDENTITY_SEED: u64 = 0x5eed_1d;
const IDENTITY_SAMPLES: usize = 64;
const CANONICAL_TERM_CAP: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Const(ComplexScalar),
    Var,
    Rational(RationalFn),
    Exp(LaurentPolynomial),
    Add(MeroExpr, MeroExpr),
    Sub(MeroExpr, MeroExpr),
    Mul(MeroExpr, MeroExpr),
    Div(MeroExpr, MeroExpr),
    Neg(MeroExpr),
}

struct Inner {
    node: Node,
    derivative: OnceLock<MeroExpr>,
}

#[derive(Clone)]
pub struct MeroExpr(Arc<Inner>);

impl PartialEq for MeroExpr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.node == other.0.node
    }
}

impl fmt::Debug for MeroExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn one() -> ComplexScalar {
    Complex64::new(1.0, 0.0)
}

impl MeroExpr {
    /// Wraps a node without any folding.
    pub fn from_node(node: Node) -> Self {
        MeroExpr(Arc::new(Inner {
            node,
            derivative: OnceLock::new(),
        }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn constant(c: ComplexScalar) -> Self {
        Self::from_node(Node::Const(c))
    }

    pub fn real(x: f64) -> Self {
        Self::constant(Complex64::new(x, 0.0))
    }

    pub fn var() -> Self {
        Self::from_node(Node::Var)
    }

    /// Rational function node; constants and `z` come back as atoms.
    pub fn rational(r: RationalFn) -> Self {
        if let Some(c) = r.as_constant() {
            Self::constant(c)
        } else if r.is_identity() {
            Self::var()
        } else {
            Self::from_node(Node::Rational(r))
        }
    }

    /// `exp(q)`; a constant exponent folds to a constant.
    pub fn exp(q: LaurentPolynomial) -> Self {
        if q.is_constant() {
            Self::constant(q.constant_term().exp())
        } else {
            Self::from_node(Node::Exp(q))
        }
    }

    /// The rational function this node stands for, when it is an atom of the rational class.
    pub fn rational_view(&self) -> Option<RationalFn> {
        match self.node() {
            Node::Const(c) => Some(RationalFn::constant(*c)),
            Node::Var => Some(RationalFn::identity()),
            Node::Rational(r) => Some(r.clone()),
            _ => None,
        }
    }

    pub fn as_constant(&self) -> Option<ComplexScalar> {
        match self.node() {
            Node::Const(c) => Some(*c),
            Node::Rational(r) => r.as_constant(),
            _ => None,
        }
    }

    fn is_const(&self, c: ComplexScalar) -> bool {
        self.as_constant() == Some(c)
    }

    /// No `Exp` node anywhere in the tree.
    pub fn is_rational(&self) -> bool {
        match self.node() {
            Node::Const(_) | Node::Var | Node::Rational(_) => true,
            Node::Exp(_) => false,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.is_rational() && b.is_rational()
            }
            Node::Neg(a) => a.is_rational(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if let (Some(x), Some(y)) = (self.rational_view(), other.rational_view()) {
            return Self::rational(x.add(&y));
        }
        if self.is_const(Complex64::new(0.0, 0.0)) {
            return other.clone();
        }
        if other.is_const(Complex64::new(0.0, 0.0)) {
            return self.clone();
        }
        Self::from_node(Node::Add(self.clone(), other.clone()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        if let (Some(x), Some(y)) = (self.rational_view(), other.rational_view()) {
            return Self::rational(x.sub(&y));
        }
        if other.is_const(Complex64::new(0.0, 0.0)) {
            return self.clone();
        }
        if self.is_const(Complex64::new(0.0, 0.0)) {
            return other.neg();
        }
        if self == other {
            return Self::real(0.0);
        }
        Self::from_node(Node::Sub(self.clone(), other.clone()))
    }

    pub fn neg(&self) -> Self {
        if let Some(x) = self.rational_view() {
            return Self::rational(x.neg());
        }
        if let Node::Neg(inner) = self.node() {
            return inner.clone();
        }
        Self::from_node(Node::Neg(self.clone()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if let (Some(x), Some(y)) = (self.rational_view(), other.rational_view()) {
            return Self::rational(x.mul(&y));
        }
        let zero = Complex64::new(0.0, 0.0);
        if self.is_const(zero) || other.is_const(zero) {
            return Self::real(0.0);
        }
        if self.is_const(one()) {
            return other.clone();
        }
        if other.is_const(one()) {
            return self.clone();
        }
        if let (Node::Exp(p), Node::Exp(q)) = (self.node(), other.node()) {
            return Self::exp(p + q);
        }
        Self::from_node(Node::Mul(self.clone(), other.clone()))
    }

    /// Quotient; fails when the denominator is identically zero.
    pub fn div(&self, other: &Self) -> Result<Self> {
        if let (Some(x), Some(y)) = (self.rational_view(), other.rational_view()) {
            return Ok(Self::rational(x.div(&y)?));
        }
        if other.is_identically_zero() {
            return Err(Error::ZeroDivisor);
        }
        if self.is_const(Complex64::new(0.0, 0.0)) {
            return Ok(Self::real(0.0));
        }
        if other.is_const(one()) {
            return Ok(self.clone());
        }
        if let (Node::Exp(p), Node::Exp(q)) = (self.node(), other.node()) {
            return Ok(Self::exp(p - q));
        }
        let quotient = Self::from_node(Node::Div(self.clone(), other.clone()));
        Ok(quotient.fold_monomial().unwrap_or(quotient))
    }

    /// `c(z)·exp(K)` when both sides of the canonical fraction are single terms.
    fn fold_monomial(&self) -> Option<Self> {
        let f = self.to_fraction()?;
        let num = f.num.components(DEFAULT_IDENTITY_TOL);
        let den = f.den.components(DEFAULT_IDENTITY_TOL);
        let ([(kn, ln)], [(kd, ld)]) = (num.as_slice(), den.as_slice()) else {
            return None;
        };
        let c = ln.to_rational().div(&ld.to_rational()).ok()?;
        let key = kn - kd;
        let rational = Self::rational(c);
        Some(if key.is_zero() { rational } else { Self::exp(key).mul(&rational) })
    }

    pub fn powi(&self, n: i32) -> Result<Self> {
        if let Some(r) = self.rational_view() {
            return Ok(Self::rational(r.powi(n)?));
        }
        if let Node::Exp(q) = self.node() {
            return Ok(Self::exp(q.scale(Complex64::new(n as f64, 0.0))));
        }
        if n == 0 {
            return Ok(Self::real(1.0));
        }
        let mut acc = Self::real(1.0);
        let mut base = self.clone();
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        if n < 0 {
            Self::real(1.0).div(&acc)
        } else {
            Ok(acc)
        }
    }

    /// Value at `z`.
    ///
    /// A division by zero reports [`EvalError::Pole`]; magnitudes above
    /// [`OVERFLOW_CAP`] report overflow.
    pub fn eval(&self, z: ComplexScalar) -> std::result::Result<ComplexScalar, EvalError> {
        let v = match self.node() {
            Node::Const(c) => *c,
            Node::Var => z,
            Node::Rational(r) => r.eval(z)?,
            Node::Exp(q) => {
                let w = q.eval(z);
                if !crate::scalar::is_finite(w) {
                    return Err(EvalError::Pole(z));
                }
                if w.re > OVERFLOW_CAP.ln() {
                    return Err(EvalError::Overflow(z));
                }
                w.exp()
            }
            Node::Add(a, b) => a.eval(z)? + b.eval(z)?,
            Node::Sub(a, b) => a.eval(z)? - b.eval(z)?,
            Node::Mul(a, b) => a.eval(z)? * b.eval(z)?,
            Node::Div(a, b) => {
                let n = a.eval(z)?;
                let d = b.eval(z)?;
                let q = n / d;
                if d.norm() == 0.0 || !crate::scalar::is_finite(q) {
                    return Err(EvalError::Pole(z));
                }
                q
            }
            Node::Neg(a) => -a.eval(z)?,
        };
        if !(v.norm() <= OVERFLOW_CAP) {
            return Err(EvalError::Overflow(z));
        }
        Ok(v)
    }

    /// Symbolic derivative, computed once and cached.
    pub fn differentiate(&self) -> MeroExpr {
        self.0
            .derivative
            .get_or_init(|| self.derivative_uncached())
            .clone()
    }

    fn derivative_uncached(&self) -> MeroExpr {
        match self.node() {
            Node::Const(_) => Self::real(0.0),
            Node::Var => Self::real(1.0),
            Node::Rational(r) => Self::rational(r.derivative()),
            Node::Exp(q) => Self::rational(q.derivative().to_rational()).mul(self),
            Node::Add(a, b) => a.differentiate().add(&b.differentiate()),
            Node::Sub(a, b) => a.differentiate().sub(&b.differentiate()),
            Node::Mul(a, b) => a.differentiate().mul(b).add(&a.mul(&b.differentiate())),
            Node::Div(a, b) => {
                let top = a.differentiate().mul(b).sub(&a.mul(&b.differentiate()));
                let bottom = b.mul(b);
                match (top.rational_view(), bottom.rational_view()) {
                    (Some(t), Some(d)) => Self::rational(t.div(&d).expect("nonzero square")),
                    _ if top.is_const(Complex64::new(0.0, 0.0)) => Self::real(0.0),
                    _ => Self::from_node(Node::Div(top, bottom)),
                }
            }
            Node::Neg(a) => a.differentiate().neg(),
        }
    }

    /// Collapses an Exp-free expression into one rational node in lowest terms.
    pub fn simplify_rational(&self) -> Result<MeroExpr> {
        Ok(Self::from_node(Node::Rational(self.to_rational()?)))
    }

    pub fn to_rational(&self) -> Result<RationalFn> {
        Ok(match self.node() {
            Node::Const(c) => RationalFn::constant(*c),
            Node::Var => RationalFn::identity(),
            Node::Rational(r) => RationalFn::new(r.num().clone(), r.den().clone())?,
            Node::Exp(_) => return Err(Error::NotRational),
            Node::Add(a, b) => a.to_rational()?.add(&b.to_rational()?),
            Node::Sub(a, b) => a.to_rational()?.sub(&b.to_rational()?),
            Node::Mul(a, b) => a.to_rational()?.mul(&b.to_rational()?),
            Node::Div(a, b) => a.to_rational()?.div(&b.to_rational()?)?,
            Node::Neg(a) => a.to_rational()?.neg(),
        })
    }

    /// Numerator/denominator pair of exponential sums, or `None` when the
    /// expansion grows past the term cap.
    pub fn to_fraction(&self) -> Option<ExpFraction> {
        canonical::to_fraction(self, CANONICAL_TERM_CAP)
    }

    pub fn is_identically_zero(&self) -> bool {
        is_identically_equal(self, &Self::real(0.0))
    }
}

/// Identity test on the expression class.
///
/// Both sides are expanded into `Σ L_k·exp(Q_k)` fractions with Laurent
/// coefficients `L_k`. Exponentials of Laurent polynomials that differ by more
/// than a constant are linearly independent over the rational functions, so
/// `e1 ≡ e2` exactly when every coefficient of the cross-multiplied numerator
/// cancels. A coefficient counts as cancelled when it is below `tol` times the
/// magnitude of the contributions summed into it. Expressions too large to
/// expand fall back to comparing values at 64 seeded annulus points.
pub fn is_identically_equal_with(e1: &MeroExpr, e2: &MeroExpr, tol: f64) -> bool {
    if e1 == e2 {
        return true;
    }
    if let (Some(a), Some(b)) = (e1.to_fraction(), e2.to_fraction()) {
        let lhs = a.num.mul(&b.den);
        let rhs = b.num.mul(&a.den);
        return lhs.sub(&rhs).is_negligible(tol);
    }
    identical_by_sampling(e1, e2, tol, IDENTITY_SEED)
}

pub fn is_identically_equal(e1: &MeroExpr, e2: &MeroExpr) -> bool {
    is_identically_equal_with(e1, e2, DEFAULT_IDENTITY_TOL)
}

/// Probabilistic identity test: agreement at 64 seeded points of the unit-scale annulus.
pub fn identical_by_sampling(e1: &MeroExpr, e2: &MeroExpr, tol: f64, seed: u64) -> bool {
    annulus_points(seed, IDENTITY_SAMPLES, 2.0).into_iter().all(|z| {
        match (e1.eval(z), e2.eval(z)) {
            (Ok(a), Ok(b)) => (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0),
            (Err(EvalError::Pole(_)), Err(EvalError::Pole(_))) => true,
            _ => false,
        }
    })
}

/// Points used by the 16-point sampled identity checks.
pub fn check_points() -> Vec<ComplexScalar> {
    annulus_points(IDENTITY_SEED ^ 0x16, 16, 3.0)
}

/// Largest `|a−b| / max(|a|,|b|,1)` over `points`, skipping points where
/// either side has a pole or overflows.
pub fn sampled_gap(a: &MeroExpr, b: &MeroExpr, points: &[ComplexScalar]) -> f64 {
    points
        .iter()
        .filter_map(|&z| match (a.eval(z), b.eval(z)) {
            (Ok(x), Ok(y)) => Some((x - y).norm() / x.norm().max(y.norm()).max(1.0)),
            _ => None,
        })
        .fold(0.0, f64::max)
}

/// Largest relative gap between `e'` and a central difference over `points`,
/// skipping points near poles. Used to validate symbolic derivatives.
pub fn derivative_defect(e: &MeroExpr, points: &[ComplexScalar]) -> f64 {
    let de = e.differentiate();
    let mut worst: f64 = 0.0;
    for &z in points {
        let h = 1e-6 * z.norm().max(1e-3);
        let (Ok(d), Ok(p), Ok(m)) = (de.eval(z), e.eval(z + h), e.eval(z - h)) else {
            continue;
        };
        let fd = (p - m) / (2.0 * h);
        worst = worst.max((d - fd).norm() / (1.0 + d.norm()));
    }
    worst
}

impl std::ops::Add for &MeroExpr {
    type Output = MeroExpr;
    fn add(self, rhs: &MeroExpr) -> MeroExpr {
        MeroExpr::add(self, rhs)
    }
}

impl std::ops::Sub for &MeroExpr {
    type Output = MeroExpr;
    fn sub(self, rhs: &MeroExpr) -> MeroExpr {
        MeroExpr::sub(self, rhs)
    }
}

impl std::ops::Mul for &MeroExpr {
    type Output = MeroExpr;
    fn mul(self, rhs: &MeroExpr) -> MeroExpr {
        MeroExpr::mul(self, rhs)
    }
}

impl std::ops::Neg for &MeroExpr {
    type Output = MeroExpr;
    fn neg(self) -> MeroExpr {
        MeroExpr::neg(self)
    }
}

fn write_scalar(f: &mut fmt::Formatter<'_>, c: ComplexScalar) -> fmt::Result {
    write!(f, "({:?},{:?})", c.re + 0.0, c.im + 0.0)
}

fn write_terms(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (i32, ComplexScalar)>,
) -> fmt::Result {
    let mut first = true;
    for (k, c) in terms {
        if !first {
            write!(f, "+")?;
        }
        first = false;
        write_scalar(f, c)?;
        if k != 0 {
            write!(f, "*z^{k}")?;
        }
    }
    if first {
        write_scalar(f, Complex64::new(0.0, 0.0))?;
    }
    Ok(())
}

/// Fully parenthesized text that [`parse_expression`] reads back; floats are
/// printed in shortest round-trip form so rational nodes survive bit-exactly.
impl fmt::Display for MeroExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write_scalar(f, *c),
            Node::Var => write!(f, "z"),
            Node::Rational(r) => {
                let poly_terms =
                    |p: &crate::poly::Polynomial| -> Vec<(i32, ComplexScalar)> {
                        p.coeffs()
                            .iter()
                            .enumerate()
                            .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
                            .map(|(k, c)| (k as i32, *c))
                            .collect()
                    };
                let whole = r.den().degree() == Some(0);
                write!(f, "{}", if whole { "(" } else { "((" })?;
                write_terms(f, poly_terms(r.num()).into_iter())?;
                write!(f, ")")?;
                if !whole {
                    write!(f, "/(")?;
                    write_terms(f, poly_terms(r.den()).into_iter())?;
                    write!(f, "))")?;
                }
                Ok(())
            }
            Node::Exp(q) => {
                write!(f, "exp(")?;
                write_terms(f, q.terms())?;
                write!(f, ")")
            }
            Node::Add(a, b) => write!(f, "({a}+{b})"),
            Node::Sub(a, b) => write!(f, "({a}-{b})"),
            Node::Mul(a, b) => write!(f, "({a}*{b})"),
            Node::Div(a, b) => write!(f, "({a}/{b})"),
            Node::Neg(a) => write!(f, "(-{a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use crate::scalar::c64;

    fn z() -> MeroExpr {
        MeroExpr::var()
    }

    fn k(x: f64) -> MeroExpr {
        MeroExpr::real(x)
    }

    fn ez() -> MeroExpr {
        MeroExpr::exp(LaurentPolynomial::monomial(c64(1.0, 0.0), 1))
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(z().eval(c64(2.0, 0.0)), Ok(c64(2.0, 0.0)));
        let r = z().sub(&k(2.0)).div(&z().sub(&k(3.0))).unwrap();
        assert_eq!(r.eval(c64(3.0, 0.0)), Err(EvalError::Pole(c64(3.0, 0.0))));
        let e = ez().eval(c64(1.0, 0.0)).unwrap();
        assert!((e - c64(std::f64::consts::E, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn raw_division_by_zero_is_a_pole() {
        let e = MeroExpr::from_node(Node::Div(ez(), MeroExpr::from_node(Node::Sub(z(), k(3.0)))));
        assert!(matches!(e.eval(c64(3.0, 0.0)), Err(EvalError::Pole(_))));
    }

    #[test]
    fn overflow_reported() {
        let e = MeroExpr::exp(LaurentPolynomial::monomial(c64(1.0, 0.0), 1));
        assert!(matches!(e.eval(c64(800.0, 0.0)), Err(EvalError::Overflow(_))));
    }

    #[test]
    fn derivative_examples() {
        let sq = z().mul(&z());
        assert_eq!(sq.differentiate(), MeroExpr::rational(RationalFn::from_polynomial(Polynomial::new(vec![c64(0.0, 0.0), c64(2.0, 0.0)]))));

        let q = LaurentPolynomial::from_terms([(1, c64(1.0, 0.0)), (-1, c64(1.0, 0.0))]);
        let e = MeroExpr::exp(q.clone());
        let expected = k(1.0).sub(&z().powi(-2).unwrap()).mul(&MeroExpr::exp(q));
        assert!(is_identically_equal(&e.differentiate(), &expected));
        let d = e.differentiate();
        match d.node() {
            Node::Mul(a, b) => {
                assert!(a.is_rational());
                assert!(matches!(b.node(), Node::Exp(_)));
            }
            other => panic!("unexpected shape {other:?}"),
        }

        let mob = z().sub(&k(1.0)).div(&z().add(&k(1.0))).unwrap();
        let two_over = k(2.0).div(&z().add(&k(1.0)).powi(2).unwrap()).unwrap();
        assert!(is_identically_equal(&mob.differentiate(), &two_over));
    }

    #[test]
    fn derivative_matches_central_difference() {
        let e = ez().mul(&z().sub(&k(2.0))).div(&z().add(&k(0.5))).unwrap();
        let pts = annulus_points(7, 8, 2.0);
        assert!(derivative_defect(&e, &pts) < 1e-6);
    }

    #[test]
    fn derivative_is_cached() {
        let e = ez().add(&z());
        let d1 = e.differentiate();
        let d2 = e.differentiate();
        assert!(Arc::ptr_eq(&d1.0, &d2.0));
    }

    #[test]
    fn simplify_examples() {
        let raw = MeroExpr::from_node(Node::Div(
            MeroExpr::from_node(Node::Mul(
                MeroExpr::from_node(Node::Sub(z(), k(1.0))),
                MeroExpr::from_node(Node::Add(z(), k(1.0))),
            )),
            MeroExpr::from_node(Node::Sub(z(), k(1.0))),
        ));
        let s = raw.simplify_rational().unwrap();
        let Node::Rational(r) = s.node() else { panic!() };
        assert_eq!(r.den(), &Polynomial::one());
        assert!((r.num() - &Polynomial::new(vec![c64(1.0, 0.0), c64(1.0, 0.0)])).norm() < 1e-14);

        let raw = MeroExpr::from_node(Node::Sub(
            MeroExpr::from_node(Node::Div(z(), MeroExpr::from_node(Node::Sub(z(), k(2.0))))),
            k(1.0),
        ));
        let Node::Rational(r) = raw.simplify_rational().unwrap().node().clone() else { panic!() };
        assert_eq!(r.num(), &Polynomial::constant(c64(2.0, 0.0)));
        assert_eq!(r.den(), &Polynomial::new(vec![c64(-2.0, 0.0), c64(1.0, 0.0)]));

        let bad = ez().add(&k(1.0));
        assert!(matches!(bad.simplify_rational(), Err(Error::NotRational)));
    }

    #[test]
    fn simplify_is_idempotent() {
        let e = z().mul(&z()).sub(&k(3.0)).div(&z().add(&k(0.25))).unwrap();
        let once = e.simplify_rational().unwrap();
        let twice = once.simplify_rational().unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn identity_examples() {
        assert!(is_identically_equal(&z().mul(&z()), &z().powi(2).unwrap()));
        let raw = MeroExpr::from_node(Node::Div(
            MeroExpr::from_node(Node::Sub(z(), k(1.0))),
            MeroExpr::from_node(Node::Sub(z(), k(1.0))),
        ));
        assert!(is_identically_equal(&raw, &k(1.0)));
        let perturbed = ez().add(&k(1e-30).mul(&z()));
        assert!(!is_identically_equal(&ez(), &perturbed));
    }

    #[test]
    fn identity_across_exponentials() {
        // exp(z)·exp(−z) ≡ 1, written without folding
        let e_neg = MeroExpr::exp(LaurentPolynomial::monomial(c64(-1.0, 0.0), 1));
        let raw = MeroExpr::from_node(Node::Mul(ez(), e_neg));
        assert!(is_identically_equal(&raw, &k(1.0)));
        // (e^z + 1)² ≡ e^{2z} + 2e^z + 1
        let s = ez().add(&k(1.0));
        let lhs = s.mul(&s);
        let e2 = MeroExpr::exp(LaurentPolynomial::monomial(c64(2.0, 0.0), 1));
        let rhs = e2.add(&k(2.0).mul(&ez())).add(&k(1.0));
        assert!(is_identically_equal(&lhs, &rhs));
        assert!(!is_identically_equal(&lhs, &e2.add(&ez()).add(&k(1.0))));
    }

    #[test]
    fn division_by_identically_zero_rejected() {
        let zero = MeroExpr::from_node(Node::Sub(ez(), ez()));
        assert!(matches!(z().div(&zero), Err(Error::ZeroDivisor)));
    }

    #[test]
    fn sampled_identity_agrees_on_simple_cases() {
        assert!(identical_by_sampling(&z().mul(&z()), &z().powi(2).unwrap(), 1e-10, 1));
        assert!(!identical_by_sampling(&ez(), &ez().add(&z()), 1e-10, 1));
    }
}
