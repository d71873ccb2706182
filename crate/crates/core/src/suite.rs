//! Radius sweeps of the second main theorem with constant and moving targets.

use rayon::prelude::*;

use crate::divisor::{Divisor, TruncationLevel};
use crate::error::{Error, Result};
use crate::expr::{is_identically_equal, MeroExpr};
use crate::functionals::{counting, Characteristic, Profile};
use crate::growth::{self, small_term_scale, Admissibility};
use crate::locate::divisors;
use crate::report::{AbsorptionRule, MarginReport, Sweep};
use crate::scalar::ComplexScalar;
use crate::settings::Settings;

/// Minimal separation of constant targets.
const DISTINCT_VALUES: f64 = 1e-9;

pub const SMT_CONSTANT_ID: &str = "smt_constant";
pub const SMT_MOVING_ID: &str = "smt_moving";

/// A target value: `∞` or a function, constants included.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Infinity,
    Function(MeroExpr),
}

impl Target {
    pub fn value(c: ComplexScalar) -> Self {
        Target::Function(MeroExpr::constant(c))
    }

    pub fn real(x: f64) -> Self {
        Target::Function(MeroExpr::real(x))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Target::Infinity)
    }

    pub fn as_constant(&self) -> Option<ComplexScalar> {
        match self {
            Target::Infinity => None,
            Target::Function(e) => e.as_constant(),
        }
    }

    /// Short name used in report term labels.
    pub fn label(&self) -> String {
        match self {
            Target::Infinity => "inf".into(),
            Target::Function(e) => match e.as_constant() {
                Some(c) => format_value(c),
                None => e.to_string(),
            },
        }
    }
}

/// `1`, `-0.5`, `2i`, `1-3i`.
pub fn format_value(c: ComplexScalar) -> String {
    match (c.re, c.im) {
        (re, im) if im == 0.0 => format!("{}", re + 0.0),
        (re, im) if re == 0.0 => format!("{im}i"),
        (re, im) => format!("{re}{}{}i", if im < 0.0 { "-" } else { "+" }, im.abs()),
    }
}

/// Zero divisor of `f − a`, or the pole divisor of `f` for `∞`.
fn target_divisor(profile: &Profile, target: &Target) -> Result<Divisor> {
    match target {
        Target::Infinity => profile.poles().cloned(),
        Target::Function(a) => {
            let h = profile.expr().sub(a);
            if h.is_identically_zero() {
                return Err(Error::Precondition(format!("function coincides with target {}", target.label())));
            }
            Ok(divisors(&h, profile.outer(), &profile.settings().tol)?.0)
        }
    }
}

fn check_constant_targets(targets: &[Target]) -> Result<()> {
    for (i, a) in targets.iter().enumerate() {
        for (j, b) in targets.iter().enumerate().skip(i + 1) {
            let same = match (a, b) {
                (Target::Infinity, Target::Infinity) => true,
                (Target::Function(x), Target::Function(y)) => match (x.as_constant(), y.as_constant()) {
                    (Some(u), Some(v)) => (u - v).norm() <= DISTINCT_VALUES,
                    _ => is_identically_equal(x, y),
                },
                _ => false,
            };
            if same {
                return Err(Error::NonDistinctTargets { first: i, second: j });
            }
        }
    }
    Ok(())
}

fn characteristics(profile: &Profile, radii: &[f64]) -> Result<Vec<Characteristic>> {
    radii.par_iter().map(|&r| profile.characteristic(r)).collect()
}

fn require_nonconstant(f: &MeroExpr) -> Result<()> {
    if f.as_constant().is_some() || f.is_identically_zero() {
        return Err(Error::Precondition("function must be nonconstant".into()));
    }
    Ok(())
}

/// `(q−2)·T₀(r,f) ≤ Σ N₀(r, ν⁰_{f−aᵢ}) + S_f(r)` over `radii`.
pub fn check_smt_constants(f: &MeroExpr, targets: &[Target], radii: &[f64], settings: &Settings) -> Result<Sweep> {
    if targets.len() < 3 {
        return Err(Error::Precondition(format!("need at least 3 targets, got {}", targets.len())));
    }
    if targets.iter().any(|t| !t.is_infinity() && t.as_constant().is_none()) {
        return Err(Error::Precondition("targets must be constants or infinity".into()));
    }
    check_constant_targets(targets)?;
    require_nonconstant(f)?;
    settings.check_radii(radii)?;
    let profile = Profile::new(f.clone(), *settings, *radii.last().unwrap());
    let divs: Vec<Divisor> = targets
        .par_iter()
        .map(|t| target_divisor(&profile, t))
        .collect::<Result<_>>()?;
    let chars = characteristics(&profile, radii)?;
    let q = targets.len() as f64;
    let mut rows = Vec::with_capacity(radii.len());
    let mut scale = Vec::with_capacity(radii.len());
    let mut growth = Vec::with_capacity(radii.len());
    for (&r, c) in radii.iter().zip(&chars) {
        let t = c.total.value;
        let rho = c.total.adjusted_radius;
        let mut rhs = Vec::with_capacity(targets.len());
        for (target, d) in targets.iter().zip(&divs) {
            let n = counting(d, rho, TruncationLevel::Infinite)?.value;
            rhs.push((format!("N(a={})", target.label()), n));
        }
        rows.push(MarginReport::new(SMT_CONSTANT_ID, r, rho, (q - 2.0) * t, rhs));
        scale.push(small_term_scale(r, t, settings.r0));
        growth.push(t);
    }
    Ok(Sweep::judge(rows, &scale, &growth, settings.r0, AbsorptionRule::SmallTerm))
}

/// `(2q/5)·T₀(r,g) ≤ Σ N̄₀(r, ν⁰_{g−aᵢ}) + 35·Σ T₀(r,aᵢ) + S(r)` over `radii`.
///
/// The small-term regressor uses `T₀(r,g) + Σ T₀(r,aᵢ)`.
pub fn check_smt_moving(g: &MeroExpr, targets: &[Target], radii: &[f64], settings: &Settings) -> Result<Sweep> {
    if targets.len() < 5 {
        return Err(Error::Precondition(format!("need at least 5 targets, got {}", targets.len())));
    }
    check_constant_targets(targets)?;
    require_nonconstant(g)?;
    settings.check_radii(radii)?;
    let max = *radii.last().unwrap();
    let profile = Profile::new(g.clone(), *settings, max);
    let divs: Vec<Divisor> = targets
        .par_iter()
        .map(|t| target_divisor(&profile, t))
        .collect::<Result<_>>()?;
    let target_t: Vec<Option<Vec<f64>>> = targets
        .par_iter()
        .map(|t| match t {
            Target::Infinity => Ok(None),
            Target::Function(a) if a.as_constant().is_some() => Ok(Some(vec![0.0; radii.len()])),
            Target::Function(a) => {
                let p = Profile::new(a.clone(), *settings, max);
                Ok(Some(characteristics(&p, radii)?.iter().map(|c| c.total.value).collect()))
            }
        })
        .collect::<Result<_>>()?;
    let chars = characteristics(&profile, radii)?;
    let q = targets.len() as f64;
    let mut rows = Vec::with_capacity(radii.len());
    let mut scale = Vec::with_capacity(radii.len());
    let mut growth = Vec::with_capacity(radii.len());
    for (i, (&r, c)) in radii.iter().zip(&chars).enumerate() {
        let t = c.total.value;
        let rho = c.total.adjusted_radius;
        let mut rhs = Vec::with_capacity(2 * targets.len());
        let mut sum_t = 0.0;
        for ((target, d), ta) in targets.iter().zip(&divs).zip(&target_t) {
            let label = target.label();
            let n = counting(d, rho, TruncationLevel::Finite(1))?.value;
            rhs.push((format!("Nbar(a={label})"), n));
            if let Some(ta) = ta {
                rhs.push((format!("35T(a={label})"), 35.0 * ta[i]));
                sum_t += ta[i];
            }
        }
        rows.push(MarginReport::new(SMT_MOVING_ID, r, rho, 2.0 * q / 5.0 * t, rhs));
        scale.push(small_term_scale(r, t + sum_t, settings.r0));
        growth.push(t + sum_t);
    }
    Ok(Sweep::judge(rows, &scale, &growth, settings.r0, AbsorptionRule::SmallTerm))
}

/// Growth evidence for `T₀(r,e)` against `log r` (or `−log(R₀−r)`).
pub fn classify_admissible(e: &MeroExpr, radii: &[f64], settings: &Settings) -> Result<Admissibility> {
    if radii.len() < growth::MIN_ADMISSIBILITY_RADII {
        return Err(Error::DegenerateFit(format!(
            "{} radii given, at least {} needed",
            radii.len(),
            growth::MIN_ADMISSIBILITY_RADII
        )));
    }
    settings.check_radii(radii)?;
    let profile = Profile::new(e.clone(), *settings, *radii.last().unwrap());
    let chars = characteristics(&profile, radii)?;
    let samples: Vec<(f64, f64)> = radii.iter().zip(&chars).map(|(&r, c)| (r, c.total.value)).collect();
    growth::classify_admissible(&samples, settings.r0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use crate::growth::AdmissibilityVerdict;
    use crate::report::Verdict;
    use crate::settings::geometric_radii;

    fn e(s: &str) -> MeroExpr {
        parse_expression(s).unwrap()
    }

    #[test]
    fn identity_with_three_targets() {
        let targets = [Target::real(0.0), Target::real(1.0), Target::Infinity];
        let radii = geometric_radii(2.0, 30.0, 6);
        let s = check_smt_constants(&e("z"), &targets, &radii, &Settings::default()).unwrap();
        assert_eq!(s.rows.len(), 6);
        assert_ne!(s.verdict(), Verdict::Fail);
        for row in &s.rows {
            assert_eq!(row.residual.to_bits(), row.recompute_residual().to_bits());
        }
    }

    #[test]
    fn too_few_targets() {
        let targets = [Target::real(0.0), Target::Infinity];
        let r = check_smt_constants(&e("z"), &targets, &[2.0], &Settings::default());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn repeated_targets_rejected() {
        let t = vec![
            Target::real(0.0),
            Target::real(1.0),
            Target::real(2.0),
            Target::Function(e("z")),
            Target::Function(e("z")),
        ];
        let r = check_smt_moving(&e("exp(z)"), &t, &[2.0], &Settings::default());
        assert!(matches!(r, Err(Error::NonDistinctTargets { first: 3, second: 4 })));
    }

    #[test]
    fn moving_targets_rational() {
        let t = vec![
            Target::Function(e("z")),
            Target::Function(e("z+1")),
            Target::Function(e("2*z")),
            Target::Function(e("1/z")),
            Target::Infinity,
        ];
        let radii = geometric_radii(2.0, 20.0, 6);
        let s = check_smt_moving(&e("z^3+1/z"), &t, &radii, &Settings::default()).unwrap();
        assert_ne!(s.verdict(), Verdict::Fail);
        assert!(s.rows[0].term("35T(a=inf)").is_none());
    }

    #[test]
    fn admissibility() {
        let radii = geometric_radii(2.0, 50.0, 10);
        let s = Settings::default();
        assert_eq!(classify_admissible(&e("exp(z)"), &radii, &s).unwrap().verdict, AdmissibilityVerdict::AdmissibleEvidence);
        let rr = classify_admissible(&e("(z-2)^2/(z-3)"), &radii, &s).unwrap();
        assert_eq!(rr.verdict, AdmissibilityVerdict::NotAdmissibleEvidence);
        let c = classify_admissible(&e("3"), &radii, &s).unwrap();
        assert_eq!(c.verdict, AdmissibilityVerdict::NotAdmissibleEvidence);
        assert_eq!(c.fit.coefficient, 0.0);
    }
}
