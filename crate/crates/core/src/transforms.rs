//! Möbius transforms of a function against moving targets, the 3×3
//! determinant of a function and two targets, and their margin checks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divisor::{Divisor, TruncationLevel};
use crate::error::{Error, Result};
use crate::expr::{check_points, is_identically_equal, sampled_gap, MeroExpr};
use crate::functionals::{counting, Profile};
use crate::growth::small_term_scale;
use crate::locate::{divisors, rational_divisors};
use crate::rational::RationalFn;
use crate::report::{AbsorptionRule, MarginReport, Sweep};
use crate::scalar::ComplexScalar;
use crate::settings::Settings;

/// Relative tolerance of the sampled construction checks.
pub const SAMPLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransformKind {
    /// `f₂ = (f₁−a₁)/(f₁−a₂)`, three targets.
    L31,
    /// `f₂ = (f₁−a₁)/(f₁−a₂)·(a₃−a₂)/(a₃−a₁)`, four targets.
    L32,
}

impl TransformKind {
    pub fn id(self) -> &'static str {
        match self {
            TransformKind::L31 => "l31",
            TransformKind::L32 => "l32",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TransformInstance {
    pub kind: TransformKind,
    pub f1: MeroExpr,
    pub targets: Vec<MeroExpr>,
    pub f2: MeroExpr,
    pub b: MeroExpr,
}

fn check_distinct(targets: &[&MeroExpr]) -> Result<()> {
    for (i, a) in targets.iter().enumerate() {
        for (j, b) in targets.iter().enumerate().skip(i + 1) {
            if is_identically_equal(a, b) {
                return Err(Error::DegenerateTargets(format!("targets a{} and a{} coincide", i + 1, j + 1)));
            }
        }
    }
    Ok(())
}

fn degenerate(e: Error) -> Error {
    match e {
        Error::ZeroDivisor => Error::DegenerateTargets("the function coincides with a target".into()),
        other => other,
    }
}

/// `(x − p)/(x − q)`
fn ratio(x: &MeroExpr, p: &MeroExpr, q: &MeroExpr) -> Result<MeroExpr> {
    x.sub(p).div(&x.sub(q)).map_err(degenerate)
}

fn verify(what: &str, built: &MeroExpr, direct: impl Fn(ComplexScalar) -> Option<ComplexScalar>) -> Result<()> {
    let mut worst: f64 = 0.0;
    for z in check_points() {
        if let (Ok(x), Some(y)) = (built.eval(z), direct(z)) {
            worst = worst.max((x - y).norm() / x.norm().max(y.norm()).max(1.0));
        }
    }
    if worst > SAMPLE_TOL {
        return Err(Error::IdentityViolation {
            what: what.into(),
            max_rel_error: worst,
        });
    }
    Ok(())
}

fn values(es: &[&MeroExpr], z: ComplexScalar) -> Option<Vec<ComplexScalar>> {
    es.iter().map(|e| e.eval(z).ok()).collect()
}

pub fn build_l31(f1: &MeroExpr, a1: &MeroExpr, a2: &MeroExpr, a3: &MeroExpr) -> Result<TransformInstance> {
    check_distinct(&[a1, a2, a3])?;
    let f2 = ratio(f1, a1, a2)?;
    let b = ratio(a3, a1, a2)?;
    let all = [f1, a1, a2, a3];
    verify("f2", &f2, |z| values(&all, z).map(|v| (v[0] - v[1]) / (v[0] - v[2])))?;
    verify("b", &b, |z| values(&all, z).map(|v| (v[3] - v[1]) / (v[3] - v[2])))?;
    Ok(TransformInstance {
        kind: TransformKind::L31,
        f1: f1.clone(),
        targets: vec![a1.clone(), a2.clone(), a3.clone()],
        f2,
        b,
    })
}

pub fn build_l32(f1: &MeroExpr, a1: &MeroExpr, a2: &MeroExpr, a3: &MeroExpr, a4: &MeroExpr) -> Result<TransformInstance> {
    check_distinct(&[a1, a2, a3, a4])?;
    let scale = ratio(a3, a2, a1)?;
    let f2 = ratio(f1, a1, a2)?.mul(&scale);
    let b = ratio(a4, a1, a2)?.mul(&scale);
    let all = [f1, a1, a2, a3, a4];
    verify("f2", &f2, |z| {
        values(&all, z).map(|v| (v[0] - v[1]) / (v[0] - v[2]) * (v[3] - v[2]) / (v[3] - v[1]))
    })?;
    verify("b", &b, |z| {
        values(&all, z).map(|v| (v[4] - v[1]) / (v[4] - v[2]) * (v[3] - v[2]) / (v[3] - v[1]))
    })?;
    Ok(TransformInstance {
        kind: TransformKind::L32,
        f1: f1.clone(),
        targets: vec![a1.clone(), a2.clone(), a3.clone(), a4.clone()],
        f2,
        b,
    })
}

/// Shared per-sweep data: characteristics and divisors up to the largest radius.
struct Series {
    t: Vec<f64>,
    rho: Vec<f64>,
}

fn series(e: &MeroExpr, radii: &[f64], settings: &Settings) -> Result<Series> {
    if e.as_constant().is_some() {
        return Ok(Series {
            t: vec![0.0; radii.len()],
            rho: radii.to_vec(),
        });
    }
    let p = Profile::new(e.clone(), *settings, *radii.last().unwrap());
    let cs: Vec<_> = radii.par_iter().map(|&r| p.characteristic(r)).collect::<Result<_>>()?;
    Ok(Series {
        t: cs.iter().map(|c| c.total.value).collect(),
        rho: cs.iter().map(|c| c.total.adjusted_radius).collect(),
    })
}

fn zeros_of(e: &MeroExpr, outer: f64, settings: &Settings) -> Result<Divisor> {
    if e.as_constant().is_some() {
        return Ok(Divisor::new(outer));
    }
    Ok(divisors(e, outer, &settings.tol)?.0)
}

fn poles_of(e: &MeroExpr, outer: f64, settings: &Settings) -> Result<Divisor> {
    if e.as_constant().is_some() {
        return Ok(Divisor::new(outer));
    }
    Ok(divisors(e, outer, &settings.tol)?.1)
}

fn nbar(d: &Divisor, rho: f64) -> Result<f64> {
    Ok(counting(d, rho, TruncationLevel::Finite(1))?.value)
}

/// Inequalities (a), (b), (c) of the transform over `radii`, one sweep each.
///
/// Each inequality holds up to a bounded term; a sweep passes when the
/// violation stays below `10·violation(r_min) + 1` or is dominated by the
/// small-term model.
pub fn check_transform_bounds(t: &TransformInstance, radii: &[f64], settings: &Settings) -> Result<Vec<Sweep>> {
    settings.check_radii(radii)?;
    let outer = Profile::new(t.f1.clone(), *settings, *radii.last().unwrap()).outer();
    let n_sum = match t.kind {
        TransformKind::L31 => 2,
        TransformKind::L32 => 3,
    };
    let tf1 = series(&t.f1, radii, settings)?;
    let tf2 = series(&t.f2, radii, settings)?;
    let ta: Vec<Series> = t.targets.iter().map(|a| series(a, radii, settings)).collect::<Result<_>>()?;
    let one = MeroExpr::real(1.0);
    let d_f2_zero = zeros_of(&t.f2, outer, settings)?;
    let d_f2_one = zeros_of(&t.f2.sub(&one), outer, settings)?;
    let d_f2_pole = poles_of(&t.f2, outer, settings)?;
    let d_f1_pole = poles_of(&t.f1, outer, settings)?;
    let d_f1_a: Vec<Divisor> = t
        .targets
        .iter()
        .map(|a| zeros_of(&t.f1.sub(a), outer, settings))
        .collect::<Result<_>>()?;
    let d_f2_b = zeros_of(&t.f2.sub(&t.b), outer, settings)?;
    let id = t.kind.id();
    let (mut ra, mut rb, mut rc) = (Vec::new(), Vec::new(), Vec::new());
    let mut scale = Vec::new();
    let mut growth = Vec::new();
    for (i, &r) in radii.iter().enumerate() {
        let rho = tf1.rho[i];
        let sum_ta: f64 = ta.iter().map(|s| s.t[i]).sum();

        let mut rhs = vec![("T(f2)".to_string(), tf2.t[i])];
        for (k, s) in ta.iter().take(n_sum).enumerate() {
            rhs.push((format!("T(a{})", k + 1), s.t[i]));
        }
        ra.push(MarginReport::new(format!("{id}_a"), r, rho, tf1.t[i], rhs));

        let lhs = nbar(&d_f2_zero, rho)? + nbar(&d_f2_one, rho)? + nbar(&d_f2_pole, rho)?;
        let weight = match t.kind {
            TransformKind::L31 => 2.0,
            TransformKind::L32 => 3.0,
        };
        let mut rhs = Vec::new();
        if t.kind == TransformKind::L31 {
            rhs.push(("Nbar(f1=inf)".to_string(), nbar(&d_f1_pole, rho)?));
        }
        for k in 0..n_sum {
            rhs.push((format!("Nbar(f1=a{})", k + 1), nbar(&d_f1_a[k], rho)?));
            rhs.push((format!("{weight}T(a{})", k + 1), weight * ta[k].t[i]));
        }
        rb.push(MarginReport::new(format!("{id}_b"), r, rho, lhs, rhs));

        let last = t.targets.len() - 1;
        let weights: &[f64] = match t.kind {
            TransformKind::L31 => &[1.0, 2.0, 1.0],
            TransformKind::L32 => &[2.0, 3.0, 2.0, 1.0],
        };
        let mut rhs = vec![(format!("Nbar(f1=a{})", last + 1), nbar(&d_f1_a[last], rho)?)];
        for (k, w) in weights.iter().enumerate() {
            rhs.push((format!("{w}T(a{})", k + 1), w * ta[k].t[i]));
        }
        rc.push(MarginReport::new(format!("{id}_c"), r, rho, nbar(&d_f2_b, rho)?, rhs));

        scale.push(small_term_scale(r, tf1.t[i] + sum_ta, settings.r0));
        growth.push(tf1.t[i] + sum_ta);
    }
    Ok([ra, rb, rc]
        .into_iter()
        .map(|rows| Sweep::judge(rows, &scale, &growth, settings.r0, AbsorptionRule::BoundedOrSmallTerm))
        .collect())
}

pub fn check_l31_bounds(t: &TransformInstance, radii: &[f64], settings: &Settings) -> Result<Vec<Sweep>> {
    if t.kind != TransformKind::L31 {
        return Err(Error::Precondition("expected a three-target transform".into()));
    }
    check_transform_bounds(t, radii, settings)
}

pub fn check_l32_bounds(t: &TransformInstance, radii: &[f64], settings: &Settings) -> Result<Vec<Sweep>> {
    if t.kind != TransformKind::L32 {
        return Err(Error::Precondition("expected a four-target transform".into()));
    }
    check_transform_bounds(t, radii, settings)
}

/// `x·x'`, `x'`, `x² − x`.
fn row(x: &MeroExpr) -> [MeroExpr; 3] {
    let d = x.differentiate();
    [x.mul(&d), d, x.mul(x).sub(x)]
}

fn det3(m: &[[MeroExpr; 3]; 3]) -> MeroExpr {
    let minor = |i: usize, j: usize, k: usize, l: usize| m[1][i].mul(&m[2][j]).sub(&m[1][k].mul(&m[2][l]));
    m[0][0]
        .mul(&minor(1, 2, 2, 1))
        .sub(&m[0][1].mul(&minor(0, 2, 2, 0)))
        .add(&m[0][2].mul(&minor(0, 1, 1, 0)))
}

#[derive(Debug, Clone)]
pub struct DeterminantF {
    pub f: MeroExpr,
    pub b1: MeroExpr,
    pub b2: MeroExpr,
    /// Rows `(x·x', x', x²−x)` for `x = f, b₁, b₂`.
    pub det: MeroExpr,
    pub is_degenerate: bool,
}

pub fn build_determinant_f(f: &MeroExpr, b1: &MeroExpr, b2: &MeroExpr) -> DeterminantF {
    let det = det3(&[row(f), row(b1), row(b2)]);
    let is_degenerate = det.is_identically_zero();
    DeterminantF {
        f: f.clone(),
        b1: b1.clone(),
        b2: b2.clone(),
        det,
        is_degenerate,
    }
}

/// The determinant with its first row replaced by the difference of the
/// first two rows, written through `f − b₁`.
pub fn row_decomposition(d: &DeterminantF) -> MeroExpr {
    let (f, b1) = (&d.f, &d.b1);
    let u = f.sub(b1);
    let du = f.differentiate().sub(&b1.differentiate());
    let db1 = b1.differentiate();
    let phi = u.mul(&du).add(&db1.mul(&u)).add(&b1.mul(&du));
    let two_b1 = b1.add(b1);
    let psi = u.mul(&u).add(&two_b1.sub(&MeroExpr::real(1.0)).mul(&u));
    det3(&[[phi, du, psi], row(b1), row(&d.b2)])
}

/// Largest relative gap between the determinant and its row decomposition
/// over the 16 check points.
pub fn row_identity_error(d: &DeterminantF) -> f64 {
    sampled_gap(&d.det, &row_decomposition(d), &check_points())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegenerateCase {
    Sub1,
    Sub2,
    Sub3,
    Sub4,
    NotDegenerate,
}

/// `x'/(x − c)`, taken as 0 when `x` is constant.
fn log_derivative(x: &MeroExpr, c: f64) -> MeroExpr {
    let d = x.differentiate();
    if d.is_identically_zero() {
        return MeroExpr::real(0.0);
    }
    d.div(&x.sub(&MeroExpr::real(c))).unwrap_or_else(|_| MeroExpr::real(0.0))
}

/// First matching subcase of a vanishing determinant.
pub fn classify_degenerate_case(d: &DeterminantF) -> DegenerateCase {
    if !d.is_degenerate {
        return DegenerateCase::NotDegenerate;
    }
    let (l1, l2) = (log_derivative(&d.b1, 0.0), log_derivative(&d.b2, 0.0));
    let (m1, m2) = (log_derivative(&d.b1, 1.0), log_derivative(&d.b2, 1.0));
    if is_identically_equal(&l1, &l2) {
        DegenerateCase::Sub1
    } else if is_identically_equal(&m1, &m2) {
        DegenerateCase::Sub2
    } else if is_identically_equal(&l1.sub(&l2), &m1.sub(&m2)) {
        DegenerateCase::Sub3
    } else {
        DegenerateCase::Sub4
    }
}

/// `f`, `b₁`, `b₂` built from a function and five targets, none infinite.
pub fn part_a_objects(g: &MeroExpr, a: &[MeroExpr; 5]) -> Result<(MeroExpr, MeroExpr, MeroExpr)> {
    check_distinct(&a.iter().collect::<Vec<_>>())?;
    let scale = ratio(&a[2], &a[0], &a[1])?;
    let f = ratio(g, &a[1], &a[0])?.mul(&scale);
    let b1 = ratio(&a[3], &a[1], &a[0])?.mul(&scale);
    let b2 = ratio(&a[4], &a[1], &a[0])?.mul(&scale);
    Ok((f, b1, b2))
}

pub const CLAIM_ID: &str = "claim38";

/// `2T₀(r,f) ≤ N̄₀(r,ν^∞_f) + Σᵢ N̄₀(r,ν⁰_{f−bᵢ}) + 18·(T₀(r,b₁)+T₀(r,b₂)) + S(r)`
/// with `b₃ = 0`, `b₄ = 1`.
pub fn check_claim38(f: &MeroExpr, b1: &MeroExpr, b2: &MeroExpr, radii: &[f64], settings: &Settings) -> Result<Sweep> {
    settings.check_radii(radii)?;
    if f.as_constant().is_some() {
        return Err(Error::Precondition("function must be nonconstant".into()));
    }
    let targets = [b1.clone(), b2.clone(), MeroExpr::real(0.0), MeroExpr::real(1.0)];
    check_distinct(&targets.iter().collect::<Vec<_>>())?;
    let outer = Profile::new(f.clone(), *settings, *radii.last().unwrap()).outer();
    let tf = series(f, radii, settings)?;
    let tb1 = series(b1, radii, settings)?;
    let tb2 = series(b2, radii, settings)?;
    let poles = poles_of(f, outer, settings)?;
    let hits: Vec<Divisor> = targets
        .iter()
        .map(|b| {
            let h = f.sub(b);
            if h.is_identically_zero() {
                return Err(Error::DegenerateTargets("the function coincides with a target".into()));
            }
            zeros_of(&h, outer, settings)
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut scale = Vec::new();
    let mut growth = Vec::new();
    for (i, &r) in radii.iter().enumerate() {
        let rho = tf.rho[i];
        let mut rhs = vec![("Nbar(f=inf)".to_string(), nbar(&poles, rho)?)];
        for (k, d) in hits.iter().enumerate() {
            rhs.push((format!("Nbar(f=b{})", k + 1), nbar(d, rho)?));
        }
        rhs.push(("18T(b1)".into(), 18.0 * tb1.t[i]));
        rhs.push(("18T(b2)".into(), 18.0 * tb2.t[i]));
        rows.push(MarginReport::new(CLAIM_ID, r, rho, 2.0 * tf.t[i], rhs));
        let total = tf.t[i] + tb1.t[i] + tb2.t[i];
        scale.push(small_term_scale(r, total, settings.r0));
        growth.push(total);
    }
    Ok(Sweep::judge(rows, &scale, &growth, settings.r0, AbsorptionRule::SmallTerm))
}

/// One multiple zero of `f − bᵢ` and the order of the determinant there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferRow {
    /// 1-based index into `(b₁, b₂, 0, 1)`.
    pub target: usize,
    pub location: ComplexScalar,
    pub multiplicity: i64,
    pub det_multiplicity: i64,
    pub satisfied: bool,
}

fn order_at(d: &Divisor, z: ComplexScalar, rel: f64) -> i64 {
    d.points()
        .iter()
        .filter(|p| (p.location - z).norm() <= rel * (1.0 + z.norm()))
        .map(|p| p.multiplicity)
        .sum()
}

/// Every zero of multiplicity `p > 1` of `f − bᵢ` that is not a pole of
/// `b₁` or `b₂` is a zero of the determinant of order at least `p − 1`.
///
/// Rational inputs only; divisors come from exact polynomial roots.
pub fn multiple_zero_transfer(f: &RationalFn, b1: &RationalFn, b2: &RationalFn, outer: f64) -> Result<Vec<TransferRow>> {
    let e = |r: &RationalFn| MeroExpr::rational(r.clone());
    let det = build_determinant_f(&e(f), &e(b1), &e(b2));
    if det.is_degenerate {
        return Err(Error::Precondition("the determinant vanishes identically".into()));
    }
    let (det_zeros, _) = rational_divisors(&det.det.to_rational()?, outer)?;
    let (_, p1) = rational_divisors(b1, outer)?;
    let (_, p2) = rational_divisors(b2, outer)?;
    let targets = [b1.clone(), b2.clone(), RationalFn::zero(), RationalFn::constant(ComplexScalar::new(1.0, 0.0))];
    let rel = 1e-5;
    let mut rows = Vec::new();
    for (i, b) in targets.iter().enumerate() {
        let h = f.sub(b);
        if h.is_zero() {
            continue;
        }
        let (zeros, _) = rational_divisors(&h, outer)?;
        for p in zeros.points().iter().filter(|p| p.multiplicity > 1) {
            if order_at(&p1, p.location, rel) != 0 || order_at(&p2, p.location, rel) != 0 {
                continue;
            }
            let m = order_at(&det_zeros, p.location, rel);
            rows.push(TransferRow {
                target: i + 1,
                location: p.location,
                multiplicity: p.multiplicity,
                det_multiplicity: m,
                satisfied: m >= p.multiplicity - 1,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use crate::report::Verdict;
    use crate::settings::geometric_radii;

    fn e(s: &str) -> MeroExpr {
        parse_expression(s).unwrap()
    }

    #[test]
    fn l31_constant_targets() {
        let t = build_l31(&e("z"), &e("0"), &e("1"), &e("2")).unwrap();
        assert!(is_identically_equal(&t.f2, &e("z/(z-1)")));
        assert_eq!(t.b.as_constant().unwrap().re, 2.0);
    }

    #[test]
    fn l32_constant_targets() {
        let t = build_l32(&e("z"), &e("0"), &e("1"), &e("2"), &e("3")).unwrap();
        assert!(is_identically_equal(&t.f2, &e("z/(2*(z-1))")));
        assert!((t.b.as_constant().unwrap().re - 0.75).abs() < 1e-15);
    }

    #[test]
    fn coincident_targets() {
        let r = build_l31(&e("z"), &e("z^2"), &e("z*z"), &e("2"));
        assert!(matches!(r, Err(Error::DegenerateTargets(_))));
    }

    #[test]
    fn bounds_for_identity() {
        let t = build_l31(&e("z"), &e("0"), &e("1"), &e("2")).unwrap();
        let radii = geometric_radii(2.0, 100.0, 8);
        let sweeps = check_l31_bounds(&t, &radii, &Settings::default()).unwrap();
        assert_eq!(sweeps.len(), 3);
        for s in &sweeps {
            assert_ne!(s.verdict(), Verdict::Fail, "{:?}", s.summary);
        }
        let single = check_l31_bounds(&t, &[2.0], &Settings::default()).unwrap();
        assert!(single.iter().all(|s| s.rows.len() == 1 && s.rows[0].residual.is_finite()));
    }

    #[test]
    fn bounds_for_exponential() {
        let t = build_l32(&e("exp(z)"), &e("0"), &e("1"), &e("-1"), &e("2")).unwrap();
        let radii = geometric_radii(2.0, 20.0, 6);
        for s in check_l32_bounds(&t, &radii, &Settings::default()).unwrap() {
            assert_ne!(s.verdict(), Verdict::Fail, "{:?}", s.summary);
        }
    }

    #[test]
    fn determinant_cases() {
        let d = build_determinant_f(&e("z^2+1"), &e("z^2+1"), &e("z^3"));
        assert!(d.is_degenerate);
        let d = build_determinant_f(&e("exp(z)"), &e("z"), &e("z^2"));
        assert!(!d.is_degenerate);
        assert_eq!(classify_degenerate_case(&d), DegenerateCase::NotDegenerate);
        assert!(row_identity_error(&d) < 1e-8);
    }

    #[test]
    fn subcases() {
        // f = c·b₂ with b₁ = 3·b₂
        let d = build_determinant_f(&e("5*z^2"), &e("3*z^2"), &e("z^2"));
        assert!(d.is_degenerate);
        assert_eq!(classify_degenerate_case(&d), DegenerateCase::Sub1);
        let d = build_determinant_f(&e("1+5*(z^2-1)"), &e("1+3*(z^2-1)"), &e("z^2"));
        assert!(d.is_degenerate);
        assert_eq!(classify_degenerate_case(&d), DegenerateCase::Sub2);
    }

    #[test]
    fn double_zero_transfers() {
        let f = e("z+(z-2)^2").to_rational().unwrap();
        let rows = multiple_zero_transfer(&f, &e("z").to_rational().unwrap(), &e("z^2").to_rational().unwrap(), 10.0).unwrap();
        let hit = rows.iter().find(|r| r.target == 1).unwrap();
        assert_eq!(hit.multiplicity, 2);
        assert!(hit.det_multiplicity >= 1 && hit.satisfied);
    }
}
