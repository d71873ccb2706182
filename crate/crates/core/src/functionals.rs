//! Counting, proximity and characteristic functions on the annulus.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::divisor::{Divisor, TruncationLevel};
use crate::error::{Error, EvalError, Result};
use crate::expr::MeroExpr;
use crate::locate::{divisors, rational_divisors, MAX_BOUNDARY_ATTEMPTS};
use crate::quadrature::{circle_mean, circle_mean_rotated, CircleMean, MeanFailure};
use crate::rational::RationalFn;
use crate::scalar::{log_plus, ComplexScalar};
use crate::settings::Settings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FunctionalKind {
    N,
    Nbar,
    #[serde(rename = "m")]
    M,
    T,
}

impl FunctionalKind {
    pub fn label(self) -> &'static str {
        match self {
            FunctionalKind::N => "N",
            FunctionalKind::Nbar => "Nbar",
            FunctionalKind::M => "m",
            FunctionalKind::T => "T",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue {
    pub kind: FunctionalKind,
    pub radius: f64,
    pub truncation: TruncationLevel,
    pub value: f64,
    pub quad_error: f64,
    pub adjusted_radius: f64,
}

/// `N₀^[M](r, ν)` in closed form.
pub fn counting(d: &Divisor, r: f64, level: TruncationLevel) -> Result<FunctionalValue> {
    if !(r > 1.0 && r <= d.valid_outer()) {
        return Err(Error::RadiusOutOfRange {
            radius: r,
            min: 1.0,
            max: d.valid_outer(),
        });
    }
    let value: f64 = d
        .points()
        .iter()
        .map(|p| {
            let a = p.location.norm();
            let w = level.apply(p.multiplicity) as f64;
            if a >= 1.0 && a <= r {
                w * (r / a).ln()
            } else if a < 1.0 && a > 1.0 / r {
                w * (r * a).ln()
            } else {
                0.0
            }
        })
        .sum();
    Ok(FunctionalValue {
        kind: if level == TruncationLevel::Finite(1) {
            FunctionalKind::Nbar
        } else {
            FunctionalKind::N
        },
        radius: r,
        truncation: level,
        value,
        quad_error: 0.0,
        adjusted_radius: r,
    })
}

fn mean_at<F>(g: &F, t: f64, tol: f64) -> std::result::Result<CircleMean, MeanFailure>
where
    F: Fn(ComplexScalar) -> std::result::Result<f64, EvalError> + Sync,
{
    circle_mean(g, t, tol)
}

fn quad_error(radius: f64, f: MeanFailure) -> Error {
    match f {
        MeanFailure::Eval(e) => Error::Eval(e),
        MeanFailure::NotConverged { last_change } => Error::QuadratureFailure { radius, last_change },
    }
}

/// `r·(1 + step·(4^k − 1)/3)`: the first nudges are tiny, later ones move far
/// enough from a nearby singularity for the trapezoidal rule to resolve it.
fn contour_radius(r: f64, k: u32, step: f64) -> f64 {
    r * (1.0 + step * (4f64.powi(k as i32) - 1.0) / 3.0)
}

/// `Σ_{t=1/ρ,ρ} mean g − 2·unit`, with `ρ` the first nudged radius whose two
/// circles avoid poles of `g` and known divisor points.
fn symmetric_means<F>(
    g: &F,
    r: f64,
    unit: &CircleMean,
    avoid: &[&Divisor],
    settings: &Settings,
) -> Result<(f64, f64, f64)>
where
    F: Fn(ComplexScalar) -> std::result::Result<f64, EvalError> + Sync,
{
    let c = settings.tol.clearance;
    let mut last = None;
    for k in 0..MAX_BOUNDARY_ATTEMPTS {
        let rho = contour_radius(r, k, c);
        if rho >= settings.r0 || avoid.iter().any(|d| rho > d.valid_outer()) {
            break;
        }
        let touches = avoid.iter().flat_map(|d| d.points()).any(|p| {
            let m = p.location.norm();
            (m - rho).abs() < c * (1.0 + m) || (m - 1.0 / rho).abs() < c * (1.0 + m)
        });
        if touches {
            continue;
        }
        let outer = mean_at(g, rho, settings.tol.quad);
        let inner = outer.and_then(|o| mean_at(g, 1.0 / rho, settings.tol.quad).map(|i| (o, i)));
        match inner {
            Ok((o, i)) => {
                let value = o.value + i.value - 2.0 * unit.value;
                let err = o.error + i.error + 2.0 * unit.error;
                return Ok((value, err, rho));
            }
            Err(MeanFailure::Eval(EvalError::Overflow(z))) => return Err(Error::Eval(EvalError::Overflow(z))),
            Err(f) => last = Some(quad_error(rho, f)),
        }
    }
    Err(last.unwrap_or(Error::BoundaryZero { radius: r }))
}

fn log_plus_abs(e: &MeroExpr) -> impl Fn(ComplexScalar) -> std::result::Result<f64, EvalError> + Sync + '_ {
    move |z| e.eval(z).map(|v| log_plus(v.norm()))
}

/// Characteristic split into its parts, with the Cartan-form diagnostic for rational inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Characteristic {
    pub total: FunctionalValue,
    pub proximity: FunctionalValue,
    pub pole_count: FunctionalValue,
    /// `Σ_{t=1/r,r} mean log‖f‖` with `‖f‖ = √(|num|²+|den|²)`.
    pub cartan: Option<f64>,
    /// `cartan − total`; bounded in `r`.
    pub cartan_drift: Option<f64>,
}

/// Poles this close to the unit circle are subtracted from its mean.
const UNIT_POLE_BAND: f64 = 0.05;
const UNIT_PHASE: f64 = 0.001_234_567_89;

/// Per-function state reused across a radius sweep: the unit-circle mean
/// and the pole divisor up to the largest radius.
pub struct Profile {
    expr: MeroExpr,
    settings: Settings,
    outer: f64,
    unit: OnceLock<Result<CircleMean>>,
    poles: OnceLock<Result<Divisor>>,
}

impl Profile {
    /// `max_radius` bounds every radius later passed to this profile.
    pub fn new(expr: MeroExpr, settings: Settings, max_radius: f64) -> Self {
        let grow = contour_radius(max_radius, MAX_BOUNDARY_ATTEMPTS, settings.tol.clearance);
        let outer = if settings.r0.is_finite() {
            grow.min(0.5 * (max_radius + settings.r0))
        } else {
            grow
        };
        Profile {
            expr,
            settings,
            outer,
            unit: OnceLock::new(),
            poles: OnceLock::new(),
        }
    }

    pub fn expr(&self) -> &MeroExpr {
        &self.expr
    }

    /// Radius up to which divisors for this sweep are located.
    pub fn outer(&self) -> f64 {
        self.outer
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    fn unit_mean(&self) -> Result<CircleMean> {
        self.unit.get_or_init(|| self.compute_unit_mean()).clone()
    }

    /// Poles near the unit circle are subtracted as `m·log|z−b|`, whose mean
    /// is `m·log max(1,|b|)`, leaving a smooth integrand.
    fn compute_unit_mean(&self) -> Result<CircleMean> {
        let g = log_plus_abs(&self.expr);
        let near: Vec<(ComplexScalar, f64)> = match self.poles() {
            Ok(d) => d
                .points()
                .iter()
                .filter(|p| (p.location.norm() - 1.0).abs() < UNIT_POLE_BAND)
                .map(|p| (p.location, p.multiplicity as f64))
                .collect(),
            Err(_) => Vec::new(),
        };
        if near.is_empty() {
            return mean_at(&g, 1.0, self.settings.tol.quad).map_err(|f| quad_error(1.0, f));
        }
        let smooth = |z: ComplexScalar| -> std::result::Result<f64, EvalError> {
            Ok(g(z)? + near.iter().map(|(b, m)| m * (z - b).norm().ln()).sum::<f64>())
        };
        let correction: f64 = near.iter().map(|(b, m)| m * b.norm().max(1.0).ln()).sum();
        let m = circle_mean_rotated(smooth, 1.0, self.settings.tol.quad, UNIT_PHASE).map_err(|f| quad_error(1.0, f))?;
        Ok(CircleMean {
            value: m.value - correction,
            ..m
        })
    }

    pub fn poles(&self) -> Result<&Divisor> {
        self.poles
            .get_or_init(|| {
                if self.expr.as_constant().is_some() {
                    return Ok(Divisor::new(self.outer));
                }
                divisors(&self.expr, self.outer, &self.settings.tol).map(|(_, p)| p)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn proximity(&self, r: f64) -> Result<FunctionalValue> {
        self.settings.check_radius(r)?;
        let unit = self.unit_mean()?;
        let avoid: Vec<&Divisor> = self.poles().ok().into_iter().collect();
        let (value, err, rho) = symmetric_means(&log_plus_abs(&self.expr), r, &unit, &avoid, &self.settings)?;
        Ok(FunctionalValue {
            kind: FunctionalKind::M,
            radius: r,
            truncation: TruncationLevel::Infinite,
            value,
            quad_error: err,
            adjusted_radius: rho,
        })
    }

    pub fn characteristic(&self, r: f64) -> Result<Characteristic> {
        let m = self.proximity(r)?;
        let mut n = counting(self.poles()?, m.adjusted_radius, TruncationLevel::Infinite)?;
        n.radius = r;
        let (cartan, cartan_drift) = if self.expr.is_rational() {
            let f = self.expr.to_rational()?;
            let c = cartan_sum(&f, m.adjusted_radius, &self.settings)?;
            (Some(c), Some(c - (m.value + n.value)))
        } else {
            (None, None)
        };
        Ok(Characteristic {
            total: FunctionalValue {
                kind: FunctionalKind::T,
                radius: r,
                truncation: TruncationLevel::Infinite,
                value: m.value + n.value,
                quad_error: m.quad_error,
                adjusted_radius: m.adjusted_radius,
            },
            proximity: m,
            pole_count: n,
            cartan,
            cartan_drift,
        })
    }
}

fn cartan_sum(f: &RationalFn, rho: f64, settings: &Settings) -> Result<f64> {
    let g = |z: ComplexScalar| -> std::result::Result<f64, EvalError> {
        let a = f.num().eval(z).norm();
        let b = f.den().eval(z).norm();
        Ok(a.hypot(b).ln())
    };
    let mut total = 0.0;
    for t in [rho, 1.0 / rho] {
        total += mean_at(&g, t, settings.tol.quad).map_err(|e| quad_error(t, e))?.value;
    }
    Ok(total)
}

/// `m₀(r, e)`.
pub fn proximity(e: &MeroExpr, r: f64, settings: &Settings) -> Result<FunctionalValue> {
    Profile::new(e.clone(), *settings, r).proximity(r)
}

/// `T₀(r, e) = m₀(r, e) + N₀(r, ν^∞_e)`.
pub fn characteristic(e: &MeroExpr, r: f64, settings: &Settings) -> Result<Characteristic> {
    Profile::new(e.clone(), *settings, r).characteristic(r)
}

/// Both sides of Jensen's formula on the annulus, computed independently.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JensenCheck {
    pub radius: f64,
    pub adjusted_radius: f64,
    /// `N₀(r, ν⁰) − N₀(r, ν^∞)` in closed form.
    pub counting_side: f64,
    /// Circle means of `log|f|` by quadrature.
    pub integral_side: f64,
    pub residual: f64,
    pub quad_error: f64,
}

pub fn jensen_residual(f: &RationalFn, r: f64, settings: &Settings) -> Result<JensenCheck> {
    settings.check_radius(r)?;
    let outer = contour_radius(r, MAX_BOUNDARY_ATTEMPTS, settings.tol.clearance);
    let (zeros, poles) = rational_divisors(f, outer)?;
    let g = |z: ComplexScalar| -> std::result::Result<f64, EvalError> {
        let v = f.num().eval(z).norm().ln() - f.den().eval(z).norm().ln();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::Pole(z))
        }
    };
    let unit = mean_at(&g, 1.0, settings.tol.quad).map_err(|e| quad_error(1.0, e))?;
    let (integral, err, rho) = symmetric_means(&g, r, &unit, &[&zeros, &poles], settings)?;
    let n0 = counting(&zeros, rho, TruncationLevel::Infinite)?.value;
    let n1 = counting(&poles, rho, TruncationLevel::Infinite)?.value;
    let lhs = n0 - n1;
    Ok(JensenCheck {
        radius: r,
        adjusted_radius: rho,
        counting_side: lhs,
        integral_side: integral,
        residual: (lhs - integral).abs(),
        quad_error: err,
    })
}
