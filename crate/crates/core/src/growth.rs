//! Growth fits: the small-term surrogate and the admissibility classifier.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthModel {
    /// `c·log r`
    LogR,
    /// `c·r^α`
    RPower,
    /// `c·log(r·T)`
    LogRT,
    /// `c·log(T/(R₀−r))`
    LogTOverGap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub model: GrowthModel,
    pub coefficient: f64,
    pub exponent: f64,
    pub sample_radii: Vec<f64>,
    pub residual_rms: f64,
}

pub const MIN_FIT_RADII: usize = 6;

/// Regressor of the small-term model at one radius, floored at 1.
///
/// `log(r·T)` when `R₀ = ∞`, `log(T/(R₀−r))` otherwise.
pub fn small_term_scale(r: f64, t: f64, r0: f64) -> f64 {
    let t = t.max(f64::MIN_POSITIVE);
    let raw = if r0.is_finite() {
        (t / (r0 - r)).ln()
    } else {
        (r * t).ln()
    };
    raw.max(1.0)
}

fn through_origin(x: &[f64], y: &[f64]) -> (f64, f64) {
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let c = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let rms = (x.iter().zip(y).map(|(a, b)| (b - c * a).powi(2)).sum::<f64>() / x.len() as f64).sqrt();
    (c, rms)
}

fn check_samples(samples: &[(f64, f64)], min: usize) -> Result<()> {
    if samples.len() < min {
        return Err(Error::DegenerateFit(format!(
            "{} radii given, at least {min} needed",
            samples.len()
        )));
    }
    if !samples.windows(2).all(|w| w[0].0 < w[1].0) {
        return Err(Error::DegenerateFit("radii must be strictly increasing".into()));
    }
    Ok(())
}

/// Least-squares `value ≈ c·x(r)` with `x` the [`small_term_scale`] regressor.
pub fn fit_small_term(samples: &[(f64, f64)], t_samples: &[(f64, f64)], r0: f64) -> Result<GrowthFit> {
    check_samples(samples, MIN_FIT_RADII)?;
    if t_samples.len() != samples.len() || samples.iter().zip(t_samples).any(|(a, b)| a.0 != b.0) {
        return Err(Error::DegenerateFit("value and T samples must share radii".into()));
    }
    let ts: Vec<f64> = t_samples.iter().map(|s| s.1).collect();
    let (lo, hi) = ts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| (a.min(t), b.max(t)));
    if hi - lo <= 1e-12 * (1.0 + hi.abs()) {
        return Err(Error::DegenerateFit("T is constant across the samples".into()));
    }
    let x: Vec<f64> = t_samples.iter().map(|&(r, t)| small_term_scale(r, t, r0)).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (c, rms) = through_origin(&x, &y);
    Ok(GrowthFit {
        model: if r0.is_finite() {
            GrowthModel::LogTOverGap
        } else {
            GrowthModel::LogRT
        },
        coefficient: c,
        exponent: 1.0,
        sample_radii: samples.iter().map(|s| s.0).collect(),
        residual_rms: rms,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdmissibilityVerdict {
    AdmissibleEvidence,
    NotAdmissibleEvidence,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub verdict: AdmissibilityVerdict,
    /// `T₀/log r` (or `T₀/(−log(R₀−r))`) per radius.
    pub ratios: Vec<f64>,
    pub fit: GrowthFit,
}

pub const MIN_ADMISSIBILITY_RADII: usize = 8;

/// Evidence for or against `limsup T₀/log r = ∞` from a finite sweep.
///
/// The ratio growing past tenfold between the first and last radius is
/// evidence for admissibility. Ratios over the outer half of the sweep all
/// within 20% of their mean are evidence against.
pub fn classify_admissible(samples: &[(f64, f64)], r0: f64) -> Result<Admissibility> {
    check_samples(samples, MIN_ADMISSIBILITY_RADII)?;
    let scale = |r: f64| if r0.is_finite() { -(r0 - r).ln() } else { r.ln() };
    let usable: Vec<(f64, f64)> = samples.iter().copied().filter(|&(r, _)| scale(r) > 0.0).collect();
    if usable.len() < MIN_ADMISSIBILITY_RADII {
        return Err(Error::DegenerateFit("too few radii with a positive growth scale".into()));
    }
    let x: Vec<f64> = usable.iter().map(|&(r, _)| scale(r)).collect();
    let y: Vec<f64> = usable.iter().map(|s| s.1).collect();
    let (c, rms) = through_origin(&x, &y);
    let fit = GrowthFit {
        model: GrowthModel::LogR,
        coefficient: c,
        exponent: 1.0,
        sample_radii: usable.iter().map(|s| s.0).collect(),
        residual_rms: rms,
    };
    let ratios: Vec<f64> = y.iter().zip(&x).map(|(t, s)| t / s).collect();
    let peak = y.iter().fold(0.0f64, |a, t| a.max(t.abs()));
    let verdict = if peak < 1e-12 {
        AdmissibilityVerdict::NotAdmissibleEvidence
    } else {
        let first = ratios[0];
        let last = *ratios.last().unwrap();
        let tail = &ratios[ratios.len() / 2..];
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        if first > 0.0 && last > 10.0 * first {
            AdmissibilityVerdict::AdmissibleEvidence
        } else if tail.iter().all(|q| (q - mean).abs() <= 0.2 * mean.abs()) {
            AdmissibilityVerdict::NotAdmissibleEvidence
        } else {
            AdmissibilityVerdict::Inconclusive
        }
    };
    let fit = if peak < 1e-12 {
        GrowthFit {
            coefficient: 0.0,
            residual_rms: 0.0,
            ..fit
        }
    } else {
        fit
    };
    Ok(Admissibility { verdict, ratios, fit })
}

/// Least-squares `T ≈ c·r^α` on positive samples.
pub fn fit_power(samples: &[(f64, f64)]) -> Result<GrowthFit> {
    check_samples(samples, MIN_FIT_RADII)?;
    if samples.iter().any(|s| s.1 <= 0.0) {
        return Err(Error::DegenerateFit("power fit needs positive values".into()));
    }
    let lx: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ly: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let alpha = sxy / sxx;
    let logc = my - alpha * mx;
    let rms = (lx.iter().zip(&ly).map(|(x, y)| (y - logc - alpha * x).powi(2)).sum::<f64>() / n).sqrt();
    Ok(GrowthFit {
        model: GrowthModel::RPower,
        coefficient: logc.exp(),
        exponent: alpha,
        sample_radii: samples.iter().map(|s| s.0).collect(),
        residual_rms: rms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::settings::geometric_radii;

    #[test]
    fn zero_values_fit_zero() {
        let r = geometric_radii(2.0, 50.0, 8);
        let v: Vec<_> = r.iter().map(|&r| (r, 0.0)).collect();
        let t: Vec<_> = r.iter().map(|&r| (r, r)).collect();
        assert_eq!(fit_small_term(&v, &t, f64::INFINITY).unwrap().coefficient, 0.0);
    }

    #[test]
    fn exact_model_recovered() {
        let r = geometric_radii(2.0, 50.0, 8);
        let t: Vec<_> = r.iter().map(|&r| (r, r * r)).collect();
        let v: Vec<_> = t.iter().map(|&(r, t)| (r, (r * t).ln())).collect();
        let fit = fit_small_term(&v, &t, f64::INFINITY).unwrap();
        assert!((fit.coefficient - 1.0).abs() < 1e-9);
        assert!(fit.residual_rms < 1e-12);
    }

    #[test]
    fn constant_t_is_degenerate() {
        let r = geometric_radii(2.0, 50.0, 8);
        let t: Vec<_> = r.iter().map(|&r| (r, 3.0)).collect();
        assert!(matches!(fit_small_term(&t, &t, f64::INFINITY), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn admissibility_examples() {
        let r = geometric_radii(2.0, 50.0, 10);
        let pi = std::f64::consts::PI;
        let exp: Vec<_> = r.iter().map(|&r| (r, (r + 1.0 / r - 2.0) / pi)).collect();
        assert_eq!(classify_admissible(&exp, f64::INFINITY).unwrap().verdict, AdmissibilityVerdict::AdmissibleEvidence);
        let rat: Vec<_> = r.iter().map(|&r| (r, 2.0 * r.ln() + 0.01)).collect();
        assert_eq!(classify_admissible(&rat, f64::INFINITY).unwrap().verdict, AdmissibilityVerdict::NotAdmissibleEvidence);
        let c: Vec<_> = r.iter().map(|&r| (r, 0.0)).collect();
        let a = classify_admissible(&c, f64::INFINITY).unwrap();
        assert_eq!(a.verdict, AdmissibilityVerdict::NotAdmissibleEvidence);
        assert_eq!(a.fit.coefficient, 0.0);
    }

    #[test]
    fn power_fit() {
        let r = geometric_radii(2.0, 50.0, 8);
        let v: Vec<_> = r.iter().map(|&r| (r, 3.0 * r.powf(1.5))).collect();
        let f = fit_power(&v).unwrap();
        assert!((f.exponent - 1.5).abs() < 1e-12 && (f.coefficient - 3.0).abs() < 1e-10);
    }
}
