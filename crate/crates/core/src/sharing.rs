//! Truncated sharing of a finite value set, the polynomial `P_S`, and the
//! finiteness bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divisor::{Divisor, TruncationLevel};
use crate::error::{Error, Result};
use crate::expr::{check_points, MeroExpr};
use crate::functionals::{counting, Profile};
use crate::growth::small_term_scale;
use crate::locate::divisors;
use crate::poly::Polynomial;
use crate::report::{AbsorptionRule, MarginReport, Sweep};
use crate::roots::polynomial_roots;
use crate::scalar::ComplexScalar;
use crate::settings::Settings;

/// Minimal pairwise distance of set elements.
pub const MIN_SEPARATION: f64 = 1e-9;
/// Relative location tolerance when comparing divisor sums.
pub const MATCH_REL: f64 = 1e-6;
/// Relative tolerance of the sampled identity for `φ`.
pub const IDENTITY_TOL: f64 = 1e-8;

pub const LOWER_ID: &str = "sharing_lower";
pub const UPPER_ID: &str = "sharing_upper";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteSet {
    values: Vec<ComplexScalar>,
}

impl FiniteSet {
    pub fn new(values: Vec<ComplexScalar>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Precondition("the value set is empty".into()));
        }
        for (i, a) in values.iter().enumerate() {
            for (j, b) in values.iter().enumerate().skip(i + 1) {
                if (a - b).norm() <= MIN_SEPARATION {
                    return Err(Error::NonDistinctTargets { first: i, second: j });
                }
            }
        }
        Ok(FiniteSet { values })
    }

    pub fn from_reals(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| ComplexScalar::new(x, 0.0)).collect())
    }

    pub fn values(&self) -> &[ComplexScalar] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// `P_S(w) = Π (w − aᵢ)` with the distinct zeros of `P'_S`.
#[derive(Debug, Clone)]
pub struct SetPolynomial {
    pub p: Polynomial,
    pub derivative: Polynomial,
    /// Number of distinct zeros of `P'_S`.
    pub k: usize,
    pub critical_zeros: Vec<ComplexScalar>,
}

pub fn build_ps(s: &FiniteSet) -> Result<SetPolynomial> {
    if s.len() < 2 {
        return Err(Error::Precondition("the value set needs at least two elements".into()));
    }
    let roots: Vec<(ComplexScalar, usize)> = s.values().iter().map(|&a| (a, 1)).collect();
    let p = Polynomial::from_roots(&roots);
    let derivative = p.derivative();
    let clusters = polynomial_roots(&derivative, Settings::default().tol.clustering)?;
    Ok(SetPolynomial {
        k: clusters.len(),
        critical_zeros: clusters.iter().map(|c| c.center).collect(),
        p,
        derivative,
    })
}

/// `p(x)` by Horner's rule in expression arithmetic.
fn compose(p: &Polynomial, x: &MeroExpr) -> MeroExpr {
    let mut acc = MeroExpr::real(0.0);
    for &c in p.coeffs().iter().rev() {
        acc = acc.mul(x).add(&MeroExpr::constant(c));
    }
    acc
}

#[derive(Debug, Clone)]
pub struct SharingInstance {
    pub f: MeroExpr,
    pub g: MeroExpr,
    pub set: FiniteSet,
    pub level: TruncationLevel,
    /// `Σᵢ min(l, ν⁰_{f−aᵢ})`.
    pub f_sum: Divisor,
    pub g_sum: Divisor,
    pub shares: bool,
}

fn truncated_sum(e: &MeroExpr, s: &FiniteSet, level: TruncationLevel, outer: f64, settings: &Settings) -> Result<Divisor> {
    let parts: Vec<Divisor> = s
        .values()
        .par_iter()
        .map(|&a| {
            let h = e.sub(&MeroExpr::constant(a));
            if h.is_identically_zero() {
                return Err(Error::Precondition("a function is identically equal to a set value".into()));
            }
            Ok(divisors(&h, outer, &settings.tol)?.0.truncate(level))
        })
        .collect::<Result<_>>()?;
    let mut total = Divisor::with_cluster_rel(outer, settings.tol.clustering);
    for d in &parts {
        total = total.sum(d);
    }
    Ok(total)
}

/// Whether `f` and `g` share `S` with multiplicities truncated to `level` on
/// the annulus of outer radius `outer`.
pub fn shares_set(
    f: &MeroExpr,
    g: &MeroExpr,
    s: &FiniteSet,
    level: TruncationLevel,
    outer: f64,
    settings: &Settings,
) -> Result<SharingInstance> {
    let f_sum = truncated_sum(f, s, level, outer, settings)?;
    let g_sum = truncated_sum(g, s, level, outer, settings)?;
    let common = f_sum.valid_outer().min(g_sum.valid_outer());
    let shares = f_sum.restrict(common).approx_eq(&g_sum.restrict(common), MATCH_REL);
    Ok(SharingInstance {
        f: f.clone(),
        g: g.clone(),
        set: s.clone(),
        level,
        f_sum,
        g_sum,
        shares,
    })
}

/// Auxiliary functions of the finiteness argument for candidates `f_j`
/// sharing `S` with `g`.
#[derive(Debug, Clone)]
pub struct SharingObjects {
    /// `P_S(f_j)/P_S(g)`.
    pub psi: Vec<MeroExpr>,
    /// `P'_S(f_j)·f_j'/P_S(f_j)`.
    pub phi_j: Vec<MeroExpr>,
    /// `−Ψ_j'/Ψ_j`, so that `φ = α_j + φ_j`.
    pub alpha: Vec<MeroExpr>,
    /// `P'_S(g)·g'/P_S(g)`.
    pub phi: MeroExpr,
    /// Largest relative defect of `φ − α_j − φ_j` over the 16 check points.
    pub max_identity_error: f64,
}

fn log_derivative_of_composition(ps: &SetPolynomial, x: &MeroExpr) -> Result<MeroExpr> {
    let px = compose(&ps.p, x);
    compose(&ps.derivative, x)
        .mul(&x.differentiate())
        .div(&px)
        .map_err(|_| Error::Precondition("P_S of a candidate vanishes identically".into()))
}

pub fn build_theorem13_objects(f_list: &[MeroExpr], g: &MeroExpr, s: &FiniteSet) -> Result<SharingObjects> {
    let ps = build_ps(s)?;
    let pg = compose(&ps.p, g);
    let phi = log_derivative_of_composition(&ps, g)?;
    let mut psi = Vec::new();
    let mut phi_j = Vec::new();
    let mut alpha = Vec::new();
    for f in f_list {
        let pf = compose(&ps.p, f);
        let q = pf
            .div(&pg)
            .map_err(|_| Error::Precondition("P_S(g) vanishes identically".into()))?;
        let a = q.differentiate().div(&q).map_err(|_| Error::Precondition("P_S(f) vanishes identically".into()))?;
        psi.push(q);
        phi_j.push(log_derivative_of_composition(&ps, f)?);
        alpha.push(a.neg());
    }
    let points = check_points();
    let mut worst: f64 = 0.0;
    for (a, pj) in alpha.iter().zip(&phi_j) {
        for &z in &points {
            if let (Ok(x), Ok(y), Ok(w)) = (phi.eval(z), a.eval(z), pj.eval(z)) {
                let scale = x.norm().max(y.norm()).max(w.norm()).max(1.0);
                worst = worst.max((x - y - w).norm() / scale);
            }
        }
    }
    if worst > IDENTITY_TOL {
        return Err(Error::IdentityViolation {
            what: "phi = alpha_j + phi_j".into(),
            max_rel_error: worst,
        });
    }
    Ok(SharingObjects {
        psi,
        phi_j,
        alpha,
        phi,
        max_identity_error: worst,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinitenessBound {
    pub q: usize,
    pub k: usize,
    pub level: TruncationLevel,
    /// `(5k+3)·l/(2l−175)`, `(5k+3)/2` at `l = ∞`, `∞` when vacuous.
    pub threshold: f64,
    pub satisfied: bool,
    /// `2l − 175 ≤ 0`: no `q` satisfies the bound.
    pub vacuous: bool,
    /// `k + 2`, the constant of the holomorphic case on the plane.
    pub holomorphic_threshold: f64,
    pub holomorphic_satisfied: bool,
}

pub fn evaluate_bound(q: usize, k: usize, level: TruncationLevel) -> FinitenessBound {
    let a = 5.0 * k as f64 + 3.0;
    let (threshold, vacuous) = match level {
        TruncationLevel::Infinite => (a / 2.0, false),
        TruncationLevel::Finite(l) => {
            let den = 2.0 * l as f64 - 175.0;
            if den <= 0.0 {
                (f64::INFINITY, true)
            } else {
                (a * l as f64 / den, false)
            }
        }
    };
    let holomorphic = k as f64 + 2.0;
    FinitenessBound {
        q,
        k,
        level,
        threshold,
        satisfied: !vacuous && q as f64 > threshold,
        vacuous,
        holomorphic_threshold: holomorphic,
        holomorphic_satisfied: q as f64 > holomorphic,
    }
}

/// The closing arithmetic `2(q−1) ≤ 5(k+1+35q/l)` and the thresholds on `q`
/// it is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub q: usize,
    pub k: usize,
    pub level: TruncationLevel,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// `(5k+3)·l/(2l−175)`.
    pub stated_threshold: f64,
    /// `(5k+7)·l/(2l−175)`, solving the closing inequality for `q`.
    pub solved_threshold: f64,
}

pub fn chain_check(q: usize, k: usize, level: TruncationLevel) -> ChainCheck {
    let inv_l = match level {
        TruncationLevel::Infinite => 0.0,
        TruncationLevel::Finite(l) => 1.0 / l as f64,
    };
    let (qf, kf) = (q as f64, k as f64);
    let lhs = 2.0 * (qf - 1.0);
    let rhs = 5.0 * (kf + 1.0 + 35.0 * qf * inv_l);
    let solve = |a: f64| match level {
        TruncationLevel::Infinite => a / 2.0,
        TruncationLevel::Finite(l) => {
            let den = 2.0 * l as f64 - 175.0;
            if den <= 0.0 {
                f64::INFINITY
            } else {
                a * l as f64 / den
            }
        }
    };
    ChainCheck {
        q,
        k,
        level,
        lhs,
        rhs,
        holds: lhs <= rhs,
        stated_threshold: solve(5.0 * kf + 3.0),
        solved_threshold: solve(5.0 * kf + 7.0),
    }
}

#[derive(Debug, Clone)]
pub struct SharingCheck {
    /// `(q−1)·T₀(r,f_j) ≤ T₀(r,φ)`, one sweep per candidate.
    pub lower: Vec<Sweep>,
    /// `Σ_j N̄₀(r, ν⁰_{φ−α_j}) ≤ (k+1+35q/l)·Σ_j T₀(r,f_j)`.
    pub upper: Sweep,
    pub chain: ChainCheck,
    pub bound: FinitenessBound,
}

fn t_series(e: &MeroExpr, radii: &[f64], settings: &Settings) -> Result<(Vec<f64>, Vec<f64>)> {
    if e.as_constant().is_some() {
        return Ok((vec![0.0; radii.len()], radii.to_vec()));
    }
    let p = Profile::new(e.clone(), *settings, *radii.last().unwrap());
    let cs: Vec<_> = radii.par_iter().map(|&r| p.characteristic(r)).collect::<Result<_>>()?;
    Ok((
        cs.iter().map(|c| c.total.value).collect(),
        cs.iter().map(|c| c.total.adjusted_radius).collect(),
    ))
}

pub fn check_bound_31_32(
    f_list: &[MeroExpr],
    g: &MeroExpr,
    s: &FiniteSet,
    level: TruncationLevel,
    radii: &[f64],
    settings: &Settings,
) -> Result<SharingCheck> {
    if f_list.is_empty() {
        return Err(Error::Precondition("no candidate functions".into()));
    }
    settings.check_radii(radii)?;
    let ps = build_ps(s)?;
    let objects = build_theorem13_objects(f_list, g, s)?;
    let q = s.len();
    let (t_phi, rho) = t_series(&objects.phi, radii, settings)?;
    let t_f: Vec<Vec<f64>> = f_list
        .par_iter()
        .map(|f| t_series(f, radii, settings).map(|t| t.0))
        .collect::<Result<_>>()?;
    let outer = Profile::new(objects.phi.clone(), *settings, *radii.last().unwrap()).outer();
    let zero_sets: Vec<Divisor> = objects
        .phi_j
        .par_iter()
        .map(|e| {
            if e.is_identically_zero() {
                return Err(Error::Precondition("phi_j vanishes identically".into()));
            }
            Ok(divisors(e, outer, &settings.tol)?.0)
        })
        .collect::<Result<_>>()?;

    let mut lower = Vec::new();
    for (j, tf) in t_f.iter().enumerate() {
        let mut rows = Vec::new();
        let mut scale = Vec::new();
        for (i, &r) in radii.iter().enumerate() {
            rows.push(MarginReport::new(
                format!("{LOWER_ID}_{}", j + 1),
                r,
                rho[i],
                (q as f64 - 1.0) * tf[i],
                vec![("T(phi)".into(), t_phi[i])],
            ));
            scale.push(small_term_scale(r, tf[i] + t_phi[i], settings.r0));
        }
        let growth: Vec<f64> = tf.iter().zip(&t_phi).map(|(a, b)| a + b).collect();
        lower.push(Sweep::judge(rows, &scale, &growth, settings.r0, AbsorptionRule::SmallTerm));
    }

    let inv_l = match level {
        TruncationLevel::Infinite => 0.0,
        TruncationLevel::Finite(l) => 1.0 / l as f64,
    };
    let factor = ps.k as f64 + 1.0 + 35.0 * q as f64 * inv_l;
    let mut rows = Vec::new();
    let mut scale = Vec::new();
    let mut growth = Vec::new();
    for (i, &r) in radii.iter().enumerate() {
        let mut lhs = 0.0;
        for d in &zero_sets {
            lhs += counting(d, rho[i], TruncationLevel::Finite(1))?.value;
        }
        let sum_t: f64 = t_f.iter().map(|t| t[i]).sum();
        rows.push(MarginReport::new(
            UPPER_ID,
            r,
            rho[i],
            lhs,
            vec![("factor*sum_T(f_j)".into(), factor * sum_t)],
        ));
        scale.push(small_term_scale(r, sum_t, settings.r0));
        growth.push(sum_t);
    }
    let upper = Sweep::judge(rows, &scale, &growth, settings.r0, AbsorptionRule::SmallTerm);
    Ok(SharingCheck {
        lower,
        upper,
        chain: chain_check(q, ps.k, level),
        bound: evaluate_bound(q, ps.k, level),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{is_identically_equal, parse_expression};
    use crate::settings::geometric_radii;

    fn e(s: &str) -> MeroExpr {
        parse_expression(s).unwrap()
    }

    #[test]
    fn set_polynomials() {
        let p = build_ps(&FiniteSet::from_reals(&[0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(p.k, 1);
        assert!((p.critical_zeros[0].re - 0.5).abs() < 1e-14);
        assert_eq!(build_ps(&FiniteSet::from_reals(&[1.0, -1.0, 0.0]).unwrap()).unwrap().k, 2);
        assert_eq!(build_ps(&FiniteSet::from_reals(&[0.0, 1.0, 2.0, 3.0]).unwrap()).unwrap().k, 3);
        assert!(FiniteSet::from_reals(&[1.0, 1.0]).is_err());
    }

    #[test]
    fn sharing_examples() {
        let st = Settings::default();
        let one = FiniteSet::from_reals(&[1.0]).unwrap();
        let i = shares_set(&e("z^2"), &e("z^2"), &one, TruncationLevel::Finite(2), 10.0, &st).unwrap();
        assert!(i.shares);
        let two = FiniteSet::from_reals(&[2.0]).unwrap();
        assert!(!shares_set(&e("z"), &e("1/z"), &two, TruncationLevel::Infinite, 10.0, &st).unwrap().shares);
        let s01 = FiniteSet::from_reals(&[0.0, 1.0]).unwrap();
        assert!(shares_set(&e("1-z"), &e("z"), &s01, TruncationLevel::Infinite, 10.0, &st).unwrap().shares);
    }

    #[test]
    fn mobius_pair_objects() {
        let s = FiniteSet::from_reals(&[0.0, 1.0]).unwrap();
        let o = build_theorem13_objects(&[e("z"), e("1-z")], &e("z"), &s).unwrap();
        assert!(is_identically_equal(&o.psi[1], &e("1")));
        assert!(o.alpha[1].is_identically_zero());
        assert!(is_identically_equal(&o.phi_j[0], &o.phi));
        assert!(o.max_identity_error < 1e-12);
    }

    #[test]
    fn generic_identity() {
        let s = FiniteSet::from_reals(&[0.0, 1.0, -2.0]).unwrap();
        let o = build_theorem13_objects(&[e("exp(z)"), e("exp(z)*(z-3)"), e("z^2+1/z")], &e("exp(z)"), &s).unwrap();
        assert!(o.max_identity_error < 1e-8);
    }

    #[test]
    fn bound_arithmetic() {
        let b = evaluate_bound(704, 1, TruncationLevel::Finite(88));
        assert_eq!(b.threshold, 704.0);
        assert!(!b.satisfied);
        let b = evaluate_bound(7, 2, TruncationLevel::Infinite);
        assert_eq!(b.threshold, 6.5);
        assert!(b.satisfied);
        let b = evaluate_bound(100, 1, TruncationLevel::Finite(87));
        assert!(b.vacuous && !b.satisfied && b.threshold.is_infinite());
    }

    #[test]
    fn chain_thresholds() {
        let c = chain_check(704, 1, TruncationLevel::Finite(88));
        assert_eq!(c.stated_threshold, 704.0);
        assert_eq!(c.solved_threshold, 12.0 * 88.0);
    }

    #[test]
    fn bound_sweep_single_candidate() {
        let s = FiniteSet::from_reals(&[0.0, 1.0, -1.0]).unwrap();
        let radii = geometric_radii(2.0, 10.0, 4);
        let c = check_bound_31_32(&[e("exp(z)")], &e("exp(z)"), &s, TruncationLevel::Infinite, &radii, &Settings::default()).unwrap();
        assert_eq!(c.lower.len(), 1);
        assert_eq!(c.upper.rows.len(), 4);
        for row in &c.lower[0].rows {
            assert!(row.lhs.is_finite() && row.residual.is_finite());
        }
    }
}
