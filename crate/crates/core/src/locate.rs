//! Zero and pole divisors on a closed sub-annulus `1/outer ≤ |z| ≤ outer`.
//!
//! Rational inputs go through the polynomial root finder. Everything else is
//! first brought to a fraction `A/B` of exponential sums, whose parts are
//! holomorphic on the punctured plane; zeros of each part are found by the
//! argument principle on recursively subdivided annular sectors, and the
//! divisor of `A/B` is the difference of the two zero sets.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::expr::{ExpSum, MeroExpr};
use crate::laurent::LaurentPolynomial;
use crate::poly::Polynomial;
use crate::quadrature::adaptive_gk;
use crate::rational::RationalFn;
use crate::roots::polynomial_roots;
use crate::scalar::{arg_0_2pi, ComplexScalar};
use crate::settings::Tolerances;

pub const MAX_DEPTH: u32 = 40;
/// Outward nudges of the outer radius before giving up on a boundary zero.
pub const MAX_BOUNDARY_ATTEMPTS: u32 = 8;
const MOMENTS: usize = 9;
const SPLIT_ATTEMPTS: u32 = 6;
const FIRST_ANGLE: f64 = 0.123_456_789;
const CLUSTER_MOMENT_TOL: f64 = 1e-8;
/// Edges avoid points where the value carries a larger relative rounding error.
const MAX_REL_NOISE: f64 = 1e-4;

type Moments = [ComplexScalar; MOMENTS];

/// Exact zero and pole divisors of a rational function on the sub-annulus.
pub fn rational_divisors(f: &RationalFn, outer: f64) -> Result<(Divisor, Divisor)> {
    let tol = Tolerances::default();
    let zeros = polynomial_divisor(f.num(), outer, tol.clustering)?;
    let poles = polynomial_divisor(f.den(), outer, tol.clustering)?;
    Ok((zeros, poles))
}

fn polynomial_divisor(p: &Polynomial, outer: f64, cluster_rel: f64) -> Result<Divisor> {
    let mut d = Divisor::with_cluster_rel(outer, cluster_rel);
    if p.degree().unwrap_or(0) == 0 {
        return Ok(d);
    }
    for c in polynomial_roots(p, cluster_rel)? {
        let m = c.center.norm();
        if m <= outer && m >= 1.0 / outer {
            d.insert(c.center, c.multiplicity as i64);
        }
    }
    Ok(d)
}

/// Divisor of zeros of `e − target`.
pub fn locate_zeros(e: &MeroExpr, target: ComplexScalar, outer: f64) -> Result<Divisor> {
    locate_zeros_with(e, target, outer, &Tolerances::default())
}

pub fn locate_zeros_with(e: &MeroExpr, target: ComplexScalar, outer: f64, tol: &Tolerances) -> Result<Divisor> {
    let h = e.sub(&MeroExpr::constant(target));
    Ok(divisors(&h, outer, tol)?.0)
}

/// Divisor of poles of `e`.
pub fn locate_poles(e: &MeroExpr, outer: f64, tol: &Tolerances) -> Result<Divisor> {
    Ok(divisors(e, outer, tol)?.1)
}

/// Zeros of `e − a`, or poles of `e` when `target` is `None`.
pub fn value_divisor(e: &MeroExpr, target: Option<ComplexScalar>, outer: f64, tol: &Tolerances) -> Result<Divisor> {
    match target {
        Some(a) => locate_zeros_with(e, a, outer, tol),
        None => locate_poles(e, outer, tol),
    }
}

/// How zero sets are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Root finding wherever the function reduces to a Laurent polynomial.
    Auto,
    /// Argument principle throughout, rational inputs included.
    Winding,
}

/// Zero and pole divisors of `e`, complete on the returned `valid_outer`,
/// which is `outer` nudged outward when a zero sat on a boundary circle.
pub fn divisors(e: &MeroExpr, outer: f64, tol: &Tolerances) -> Result<(Divisor, Divisor)> {
    divisors_with(e, outer, tol, Method::Auto)
}

/// Zeros of `e − target` by the argument principle alone.
pub fn locate_zeros_winding(e: &MeroExpr, target: ComplexScalar, outer: f64, tol: &Tolerances) -> Result<Divisor> {
    let h = e.sub(&MeroExpr::constant(target));
    Ok(divisors_with(&h, outer, tol, Method::Winding)?.0)
}

pub fn divisors_with(e: &MeroExpr, outer: f64, tol: &Tolerances, method: Method) -> Result<(Divisor, Divisor)> {
    if e.is_rational() && method == Method::Auto {
        let r = e.to_rational()?;
        if r.is_zero() {
            return Err(Error::Precondition("expression is identically zero".into()));
        }
        return retry_outer(outer, tol, |o| {
            let z = polynomial_divisor(r.num(), o, tol.clustering).map_err(Fail::Hard)?;
            let p = polynomial_divisor(r.den(), o, tol.clustering).map_err(Fail::Hard)?;
            check_clear(&z, o, tol.clearance)?;
            check_clear(&p, o, tol.clearance)?;
            Ok((z, p))
        });
    }
    let frac = e.to_fraction().ok_or_else(|| Error::Localization {
        location: Complex64::new(0.0, 0.0),
        reason: "expression too large to expand into exponential sums".into(),
    })?;
    if frac.num.is_negligible(tol.identity) {
        return Err(Error::Precondition("expression is identically zero".into()));
    }
    retry_outer(outer, tol, |o| {
        let za = sum_zeros(&frac.num, o, tol, method)?;
        let zb = sum_zeros(&frac.den, o, tol, method)?;
        let mut net = Divisor::with_cluster_rel(o, tol.clearance);
        for (z, m) in za {
            net.insert(z, m as i64);
        }
        for (z, m) in zb {
            net.insert(z, -(m as i64));
        }
        let mut zeros = Divisor::with_cluster_rel(o, tol.clustering);
        let mut poles = Divisor::with_cluster_rel(o, tol.clustering);
        for p in net.points() {
            if p.multiplicity > 0 {
                zeros.insert(p.location, p.multiplicity);
            } else {
                poles.insert(p.location, -p.multiplicity);
            }
        }
        Ok((zeros, poles))
    })
}

enum Fail {
    Boundary,
    Hard(Error),
}

fn retry_outer<T>(outer: f64, tol: &Tolerances, mut run: impl FnMut(f64) -> std::result::Result<T, Fail>) -> Result<T> {
    for k in 0..MAX_BOUNDARY_ATTEMPTS {
        let o = outer * (1.0 + k as f64 * tol.clearance);
        match run(o) {
            Ok(v) => return Ok(v),
            Err(Fail::Boundary) => continue,
            Err(Fail::Hard(e)) => return Err(e),
        }
    }
    Err(Error::BoundaryZero { radius: outer })
}

fn check_clear(d: &Divisor, outer: f64, clearance: f64) -> std::result::Result<(), Fail> {
    for p in d.points() {
        let m = p.location.norm();
        let gap = clearance * (1.0 + m);
        if (m - outer).abs() < gap || (m - 1.0 / outer).abs() < gap {
            return Err(Fail::Boundary);
        }
    }
    Ok(())
}

fn sum_zeros(
    s: &ExpSum,
    outer: f64,
    tol: &Tolerances,
    method: Method,
) -> std::result::Result<Vec<(ComplexScalar, usize)>, Fail> {
    let comps = s.components(tol.identity);
    if comps.is_empty() {
        return Err(Fail::Hard(Error::Precondition("expression is identically zero".into())));
    }
    // c(z)·exp(K)
    if comps.len() == 1 && (method == Method::Auto || comps[0].1.is_constant()) {
        let d = laurent_zeros(&comps[0].1, outer, tol.clustering).map_err(Fail::Hard)?;
        check_clear(&d, outer, tol.clearance)?;
        return Ok(d.points().iter().map(|p| (p.location, p.multiplicity as usize)).collect());
    }
    Locator::new(&comps, tol.clearance).run(outer)
}

fn laurent_zeros(l: &LaurentPolynomial, outer: f64, cluster_rel: f64) -> Result<Divisor> {
    let lo = l.min_power().unwrap_or(0);
    let hi = l.max_power().unwrap_or(0);
    let p = Polynomial::new((lo..=hi).map(|k| l.coeff(k)).collect());
    polynomial_divisor(&p, outer, cluster_rel)
}

struct Term {
    key: LaurentPolynomial,
    dkey: LaurentPolynomial,
    coeff: LaurentPolynomial,
    dcoeff: LaurentPolynomial,
}

/// `F = Σ c_k·exp(K_k)` with its derivative, evaluated up to a common positive factor.
struct Holo {
    terms: Vec<Term>,
}

impl Holo {
    fn eval_scaled(&self, z: ComplexScalar) -> (ComplexScalar, ComplexScalar) {
        let (f, df, _) = self.eval_with_noise(z);
        (f, df)
    }

    /// Value, derivative and the magnitude `Σ |c_k|·|e_k|` bounding rounding in the value.
    fn eval_with_noise(&self, z: ComplexScalar) -> (ComplexScalar, ComplexScalar, f64) {
        let keys: Vec<ComplexScalar> = self.terms.iter().map(|t| t.key.eval(z)).collect();
        let top = keys.iter().map(|k| k.re).fold(f64::NEG_INFINITY, f64::max);
        let mut f = Complex64::new(0.0, 0.0);
        let mut df = Complex64::new(0.0, 0.0);
        let mut noise = 0.0;
        for (t, k) in self.terms.iter().zip(&keys) {
            let e = (k - top).exp();
            let c = t.coeff.eval(z);
            f += c * e;
            df += (t.dcoeff.eval(z) + c * t.dkey.eval(z)) * e;
            noise += t.coeff.eval_abs(z) * e.norm();
        }
        (f, df, noise)
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    r0: f64,
    r1: f64,
    t0: f64,
    t1: f64,
    inner_boundary: bool,
    outer_boundary: bool,
}

impl Cell {
    fn center(&self) -> ComplexScalar {
        Complex64::from_polar((self.r0 * self.r1).sqrt(), 0.5 * (self.t0 + self.t1))
    }

    fn scale(&self) -> f64 {
        let w = self.center();
        [
            Complex64::from_polar(self.r0, self.t0),
            Complex64::from_polar(self.r0, self.t1),
            Complex64::from_polar(self.r1, self.t0),
            Complex64::from_polar(self.r1, self.t1),
        ]
        .iter()
        .map(|c| (c - w).norm())
        .fold(0.0, f64::max)
        .max(self.r1 * ((self.t1 - self.t0) * 0.5).min(PI / 2.0).sin())
    }

    fn contains(&self, z: ComplexScalar) -> bool {
        let m = z.norm();
        let eps = 1e-12;
        if m < self.r0 * (1.0 - eps) || m > self.r1 * (1.0 + eps) {
            return false;
        }
        let mut a = arg_0_2pi(z);
        while a < self.t0 - eps {
            a += TAU;
        }
        a <= self.t1 + eps
    }
}

#[derive(Debug, Clone, Copy)]
struct Unsafe {
    boundary: bool,
}

fn jitter(depth: u32, attempt: u32, salt: u32) -> f64 {
    let x = (0.5 + 0.618_033_988_749_894_9 * f64::from(depth * 31 + attempt * 7 + salt * 3 + 1)).fract();
    0.08 * (2.0 * x - 1.0)
}

fn winding(m: &Moments) -> Option<usize> {
    let n = m[0].re.round();
    ((m[0] - n).norm() < 0.25 && n >= 0.0).then_some(n as usize)
}

struct Locator {
    f: Holo,
    clearance: f64,
}

impl Locator {
    fn new(comps: &[(LaurentPolynomial, LaurentPolynomial)], clearance: f64) -> Self {
        Locator {
            f: Holo {
                terms: comps
                    .iter()
                    .map(|(k, c)| Term {
                        key: k.clone(),
                        dkey: k.derivative(),
                        coeff: c.clone(),
                        dcoeff: c.derivative(),
                    })
                    .collect(),
            },
            clearance,
        }
    }

    fn run(&self, outer: f64) -> std::result::Result<Vec<(ComplexScalar, usize)>, Fail> {
        let mut quadrants = None;
        for attempt in 0..SPLIT_ATTEMPTS {
            let start = FIRST_ANGLE + attempt as f64 * 0.211;
            let cells: Vec<Cell> = (0..4)
                .map(|k| Cell {
                    r0: 1.0 / outer,
                    r1: outer,
                    t0: start + k as f64 * PI / 2.0,
                    t1: start + (k + 1) as f64 * PI / 2.0,
                    inner_boundary: true,
                    outer_boundary: true,
                })
                .collect();
            let mut moments = Vec::new();
            for c in &cells {
                match self.integrate(c) {
                    Ok(m) => moments.push(m),
                    Err(Unsafe { boundary: true }) => return Err(Fail::Boundary),
                    Err(Unsafe { boundary: false }) => break,
                }
            }
            if moments.len() == cells.len() {
                quadrants = Some((cells, moments));
                break;
            }
        }
        let Some((cells, moments)) = quadrants else {
            return Err(Fail::Hard(Error::Localization {
                location: Complex64::new(0.0, 0.0),
                reason: "cell edges could not be moved clear of a zero".into(),
            }));
        };
        let found: Vec<_> = cells
            .par_iter()
            .zip(moments.par_iter())
            .map(|(c, m)| self.resolve(c, m, 0))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(found.into_iter().flatten().collect())
    }

    fn edge(
        &self,
        w: ComplexScalar,
        scale: f64,
        boundary: bool,
        z_of: impl Fn(f64) -> (ComplexScalar, ComplexScalar),
        a: f64,
        b: f64,
    ) -> std::result::Result<Moments, Unsafe> {
        let integrand = |t: f64| -> std::result::Result<(Moments, f64), Unsafe> {
            let (z, dz) = z_of(t);
            let (f, df, noise) = self.f.eval_with_noise(z);
            let rel_noise = f64::EPSILON * noise / f.norm();
            if f.norm() < self.clearance * (1.0 + z.norm()) * df.norm() || !(rel_noise <= MAX_REL_NOISE) {
                return Err(Unsafe { boundary });
            }
            let base = df / f * dz / Complex64::new(0.0, TAU);
            let u = (z - w) / scale;
            let mut out = [Complex64::new(0.0, 0.0); MOMENTS];
            let mut p = Complex64::new(1.0, 0.0);
            let mut top: f64 = 0.0;
            for o in out.iter_mut() {
                *o = base * p;
                top = top.max(o.norm());
                p *= u;
            }
            Ok((out, top * (2.0 * rel_noise + 8.0 * f64::EPSILON)))
        };
        adaptive_gk(integrand, a, b, 1e-11, 1e-11, 30).map(|(v, _)| v)
    }

    fn integrate(&self, c: &Cell) -> std::result::Result<Moments, Unsafe> {
        let w = c.center();
        let s = c.scale();
        let (l0, l1) = (c.r0.ln(), c.r1.ln());
        let arc = |r: f64| {
            move |t: f64| {
                let z = Complex64::from_polar(r, t);
                (z, Complex64::new(0.0, 1.0) * z)
            }
        };
        let ray = |t: f64| {
            move |s: f64| {
                let z = Complex64::from_polar(s.exp(), t);
                (z, z)
            }
        };
        let parts = [
            self.edge(w, s, c.outer_boundary, arc(c.r1), c.t0, c.t1)?,
            self.edge(w, s, false, ray(c.t1), l1, l0)?,
            self.edge(w, s, c.inner_boundary, arc(c.r0), c.t1, c.t0)?,
            self.edge(w, s, false, ray(c.t0), l0, l1)?,
        ];
        let mut total = [Complex64::new(0.0, 0.0); MOMENTS];
        for p in parts {
            for (t, v) in total.iter_mut().zip(p) {
                *t += v;
            }
        }
        Ok(total)
    }

    fn split(&self, c: &Cell, depth: u32, attempt: u32) -> Vec<Cell> {
        let (l0, l1) = (c.r0.ln(), c.r1.ln());
        let mut ls = 0.5 * (l0 + l1) + jitter(depth, attempt, 0) * (l1 - l0);
        if ls.abs() < 1e-9 * (l1 - l0) {
            ls += 0.01 * (l1 - l0);
        }
        let rs = ls.exp();
        let ts = 0.5 * (c.t0 + c.t1) + jitter(depth, attempt, 1) * (c.t1 - c.t0);
        let arc_len = (c.r0 * c.r1).sqrt() * (c.t1 - c.t0);
        let radial_len = c.r1 - c.r0;
        let split_angle = radial_len <= 2.0 * arc_len;
        let split_radius = arc_len <= 2.0 * radial_len;
        let radial: Vec<(f64, f64, bool, bool)> = if split_radius {
            vec![(c.r0, rs, c.inner_boundary, false), (rs, c.r1, false, c.outer_boundary)]
        } else {
            vec![(c.r0, c.r1, c.inner_boundary, c.outer_boundary)]
        };
        let angular: Vec<(f64, f64)> = if split_angle {
            vec![(c.t0, ts), (ts, c.t1)]
        } else {
            vec![(c.t0, c.t1)]
        };
        let mut out = Vec::new();
        for &(r0, r1, ib, ob) in &radial {
            for &(t0, t1) in &angular {
                out.push(Cell {
                    r0,
                    r1,
                    t0,
                    t1,
                    inner_boundary: ib,
                    outer_boundary: ob,
                });
            }
        }
        out
    }

    fn newton(&self, start: ComplexScalar, n: usize, limit: f64) -> Option<ComplexScalar> {
        let mut z = start;
        for _ in 0..60 {
            let (f, df) = self.f.eval_scaled(z);
            if f == Complex64::new(0.0, 0.0) {
                return Some(z);
            }
            let step = n as f64 * f / df;
            if !crate::scalar::is_finite(step) || (z - start).norm() > limit {
                return None;
            }
            z -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z.norm().max(1.0) {
                break;
            }
        }
        Some(z)
    }

    /// Location of a single zero of multiplicity `n` explaining all moments, if there is one.
    fn accept(&self, c: &Cell, m: &Moments, n: usize) -> Option<ComplexScalar> {
        if n >= MOMENTS {
            return None;
        }
        let w = c.center();
        let s = c.scale();
        let mu = m[1] / n as f64;
        let centroid = w + mu * s;
        if n >= 2 {
            for j in 2..=n {
                let mut sj = Complex64::new(0.0, 0.0);
                let mut binom = 1.0;
                for i in 0..=j {
                    sj += m[i] * binom * (-mu).powu((j - i) as u32);
                    binom = binom * (j - i) as f64 / (i + 1) as f64;
                }
                if sj.norm() > CLUSTER_MOMENT_TOL {
                    return None;
                }
            }
        }
        if n >= 2 {
            return c.contains(centroid).then_some(centroid);
        }
        self.newton(centroid, n, s).filter(|z| c.contains(*z))
    }

    fn resolve(&self, c: &Cell, m: &Moments, depth: u32) -> std::result::Result<Vec<(ComplexScalar, usize)>, Fail> {
        let n = winding(m);
        match n {
            Some(0) => return Ok(Vec::new()),
            Some(n) => {
                if let Some(z) = self.accept(c, m, n) {
                    return Ok(vec![(z, n)]);
                }
                if depth >= MAX_DEPTH {
                    return Ok(vec![(c.center() + m[1] / n as f64 * c.scale(), n)]);
                }
            }
            None if depth >= MAX_DEPTH => {
                return Err(Fail::Hard(Error::Localization {
                    location: c.center(),
                    reason: "winding number did not settle to an integer".into(),
                }))
            }
            None => {}
        }
        for attempt in 0..SPLIT_ATTEMPTS {
            let children = self.split(c, depth, attempt);
            let mut child_moments = Vec::with_capacity(children.len());
            let mut clear = true;
            for ch in &children {
                match self.integrate(ch) {
                    Ok(cm) => child_moments.push(cm),
                    Err(Unsafe { boundary: true }) => return Err(Fail::Boundary),
                    Err(Unsafe { boundary: false }) => {
                        clear = false;
                        break;
                    }
                }
            }
            if !clear {
                continue;
            }
            if let Some(n) = n {
                let counts: Option<Vec<usize>> = child_moments.iter().map(winding).collect();
                if counts.is_some_and(|v| v.iter().sum::<usize>() != n) {
                    continue;
                }
            }
            let found = children
                .iter()
                .zip(&child_moments)
                .map(|(ch, cm)| self.resolve(ch, cm, depth + 1))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            return Ok(found.into_iter().flatten().collect());
        }
        match n {
            Some(n) => Ok(vec![(c.center() + m[1] / n as f64 * c.scale(), n)]),
            None => Err(Fail::Hard(Error::Localization {
                location: c.center(),
                reason: "cell edges could not be moved clear of a zero".into(),
            })),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use crate::scalar::c64;

    #[test]
    fn rational_examples() {
        let f = parse_expression("(z-2)^2*(z-0.5)/(z-3)").unwrap().to_rational().unwrap();
        let (z, p) = rational_divisors(&f, 10.0).unwrap();
        assert!(z.approx_eq(&Divisor::from_points(10.0, [(c64(0.5, 0.0), 1), (c64(2.0, 0.0), 2)]), 1e-9));
        assert!(p.approx_eq(&Divisor::from_points(10.0, [(c64(3.0, 0.0), 1)]), 1e-9));

        let f = parse_expression("1/(z-5)").unwrap().to_rational().unwrap();
        let (z, p) = rational_divisors(&f, 4.0).unwrap();
        assert!(z.is_empty() && p.is_empty());
    }

    #[test]
    fn exp_minus_one() {
        let e = parse_expression("exp(z)").unwrap();
        let d = locate_zeros(&e, c64(1.0, 0.0), 7.0).unwrap();
        assert_eq!(d.len(), 2);
        for p in d.points() {
            assert_eq!(p.multiplicity, 1);
            assert!((p.location.re).abs() < 1e-10);
            assert!((p.location.im.abs() - TAU).abs() < 1e-10);
        }
    }

    #[test]
    fn origin_is_excluded() {
        let e = parse_expression("z^2").unwrap();
        assert!(locate_zeros(&e, c64(0.0, 0.0), 2.0).unwrap().is_empty());
    }

    #[test]
    fn triple_zero() {
        let e = parse_expression("(z-2)^3").unwrap();
        let d = locate_zeros(&e, c64(0.0, 0.0), 3.0).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.points()[0].multiplicity, 3);
    }

    #[test]
    fn argument_principle_finds_multiple_zero() {
        // (z−2)³ hidden inside an exponential sum: (z−2)³·(e^z + 1) − (z−2)³·e^z
        let e = parse_expression("(z-2)^3*exp(z) + (z-2)^3*exp(2*z)/exp(z)*0 + (z-2)^3").unwrap();
        let d = locate_zeros(&e, c64(0.0, 0.0), 2.5).unwrap();
        let at_two: i64 = d.points().iter().filter(|p| (p.location - 2.0).norm() < 1e-6).map(|p| p.multiplicity).sum();
        assert_eq!(at_two, 3);
    }

    #[test]
    fn poles_of_exponential_quotient() {
        let e = parse_expression("exp(z)/((z-2)*(z+0.5))").unwrap();
        let p = locate_poles(&e, 4.0, &Tolerances::default()).unwrap();
        assert_eq!(p.len(), 2);
        let z = locate_zeros(&e, c64(0.0, 0.0), 4.0).unwrap();
        assert!(z.is_empty());
    }

    #[test]
    fn cancellation_between_parts() {
        // (e^z − 1)/(z − 2πi) has a removable point at 2πi
        let a = parse_expression("exp(z) - 1").unwrap();
        let b = parse_expression("z - (0, 6.283185307179586)").unwrap();
        let e = MeroExpr::from_node(crate::expr::Node::Div(a, b));
        let d = locate_zeros(&e, c64(0.0, 0.0), 7.0).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d.points()[0].location + Complex64::new(0.0, TAU)).norm() < 1e-9);
        assert!(locate_poles(&e, 7.0, &Tolerances::default()).unwrap().is_empty());
    }
}
