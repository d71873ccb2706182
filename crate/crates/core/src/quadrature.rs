//! Circle means by the trapezoidal rule and adaptive Gauss–Kronrod on intervals.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;

use crate::error::EvalError;
use crate::scalar::{pairwise_sum, ComplexScalar};

pub const MIN_NODES: usize = 256;
pub const MAX_NODES: usize = 1 << 20;
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleMean {
    pub value: f64,
    /// Change between the last two estimates.
    pub error: f64,
    pub nodes: usize,
}

/// Outcome of a circle mean that did not converge or hit a singular node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanFailure {
    Eval(EvalError),
    NotConverged { last_change: f64 },
}

fn sample<F>(f: &F, t: f64, phase: f64, n: usize, offset: usize, stride: usize) -> Result<f64, EvalError>
where
    F: Fn(ComplexScalar) -> Result<f64, EvalError> + Sync,
{
    let count = n / stride;
    let values: Vec<f64> = (0..count)
        .into_par_iter()
        .with_min_len(CHUNK)
        .map(|k| {
            let theta = phase + TAU * (offset + k * stride) as f64 / n as f64;
            f(Complex64::from_polar(t, theta))
        })
        .collect::<Result<_, _>>()?;
    Ok(pairwise_sum(&values))
}

/// `(1/2π)∫ f(t·e^{iθ}) dθ`, doubling the node count from 256 until two
/// successive estimates differ by less than `tol·(1+|estimate|)`.
pub fn circle_mean<F>(f: F, t: f64, tol: f64) -> Result<CircleMean, MeanFailure>
where
    F: Fn(ComplexScalar) -> Result<f64, EvalError> + Sync,
{
    circle_mean_rotated(f, t, tol, 0.0)
}

/// [`circle_mean`] on the node grid rotated by `phase`.
pub fn circle_mean_rotated<F>(f: F, t: f64, tol: f64, phase: f64) -> Result<CircleMean, MeanFailure>
where
    F: Fn(ComplexScalar) -> Result<f64, EvalError> + Sync,
{
    let mut n = MIN_NODES;
    let mut sum = sample(&f, t, phase, n, 0, 1).map_err(MeanFailure::Eval)?;
    let mut estimate = sum / n as f64;
    while n < MAX_NODES {
        let fresh = sample(&f, t, phase, 2 * n, 1, 2).map_err(MeanFailure::Eval)?;
        sum += fresh;
        n *= 2;
        let next = sum / n as f64;
        let change = (next - estimate).abs();
        estimate = next;
        if change < tol * (1.0 + next.abs()) {
            return Ok(CircleMean {
                value: next,
                error: change,
                nodes: n,
            });
        }
        if n == MAX_NODES {
            return Err(MeanFailure::NotConverged { last_change: change });
        }
    }
    unreachable!("loop returns at MAX_NODES")
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One G7K15 panel of a vector-valued integrand: (Kronrod estimate, |K − G|,
/// bound on the rounding error of the estimate).
fn gk15<const D: usize, E>(
    f: &mut impl FnMut(f64) -> Result<([ComplexScalar; D], f64), E>,
    a: f64,
    b: f64,
) -> Result<([ComplexScalar; D], f64, f64), E> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut k = [Complex64::new(0.0, 0.0); D];
    let mut g = [Complex64::new(0.0, 0.0); D];
    let mut abs = 0.0;
    let mut noise = 0.0;
    for (i, &x) in GK_NODES.iter().enumerate() {
        let points: &[f64] = if x == 0.0 { &[0.0] } else { &[-1.0, 1.0] };
        for &s in points {
            let (v, dv) = f(mid + s * half * x)?;
            abs += K15_WEIGHTS[i] * v.iter().map(|c| c.norm()).fold(0.0, f64::max);
            noise += K15_WEIGHTS[i] * dv;
            for d in 0..D {
                k[d] += v[d] * K15_WEIGHTS[i];
                // odd Kronrod indices are the Gauss nodes
                if i % 2 == 1 {
                    g[d] += v[d] * G7_WEIGHTS[i / 2];
                }
            }
        }
    }
    let mut err = 0.0f64;
    for d in 0..D {
        k[d] *= half;
        g[d] *= half;
        err = err.max((k[d] - g[d]).norm());
    }
    Ok((k, err, (50.0 * f64::EPSILON * abs + 10.0 * noise) * half.abs()))
}

/// Adaptive G7K15 of a vector integrand over `[a, b]`; the integrand returns its
/// values with a bound on their absolute error.
///
/// Panels are bisected until `|K − G| ≤ max(abs_tol, rel_tol·|K|)`, the
/// difference is at rounding level, or the depth limit is reached; the result
/// is the sum of accepted panels in left-to-right order.
pub fn adaptive_gk<const D: usize, E>(
    mut f: impl FnMut(f64) -> Result<([ComplexScalar; D], f64), E>,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_depth: u32,
) -> Result<([ComplexScalar; D], f64), E> {
    let mut total = [Complex64::new(0.0, 0.0); D];
    let mut total_err = 0.0;
    let mut stack = vec![(a, b, 0u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let (v, err, rounding) = gk15(&mut f, lo, hi)?;
        let size = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if err <= abs_tol.max(rel_tol * size) * ((hi - lo) / (b - a)).sqrt() || err <= rounding || depth >= max_depth {
            for d in 0..D {
                total[d] += v[d];
            }
            total_err += err;
        } else {
            let m = 0.5 * (lo + hi);
            stack.push((m, hi, depth + 1));
            stack.push((lo, m, depth + 1));
        }
    }
    Ok((total, total_err))
}
