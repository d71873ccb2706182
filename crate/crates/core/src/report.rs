//! Margin reports and the sweep verdict rules.

use serde::{Deserialize, Serialize};

use crate::growth::{fit_small_term, GrowthFit, MIN_FIT_RADII};
use crate::scalar::canonical_sum;

/// Largest small-term coefficient still counted as a pass.
pub const SMALL_TERM_LIMIT: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    PassWithSmallTerm,
    Fail,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::PassWithSmallTerm => "pass_with_small_term",
            Verdict::Fail => "fail",
        }
    }

    /// Worst of a sequence; `Pass` when empty.
    pub fn worst(vs: impl IntoIterator<Item = Verdict>) -> Verdict {
        vs.into_iter().max().unwrap_or(Verdict::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhsTerm {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub inequality_id: String,
    pub radius: f64,
    pub adjusted_radius: f64,
    pub lhs: f64,
    pub rhs_terms: Vec<RhsTerm>,
    /// `canonical_sum(rhs_terms) − lhs`.
    pub residual: f64,
    pub fit: Option<GrowthFit>,
    pub verdict: Verdict,
}

impl MarginReport {
    /// Report with the residual filled in and a provisional per-row verdict.
    pub fn new(id: impl Into<String>, radius: f64, adjusted_radius: f64, lhs: f64, rhs: Vec<(String, f64)>) -> Self {
        let rhs_terms: Vec<RhsTerm> = rhs.into_iter().map(|(name, value)| RhsTerm { name, value }).collect();
        let residual = residual_of(lhs, &rhs_terms);
        MarginReport {
            inequality_id: id.into(),
            radius,
            adjusted_radius,
            lhs,
            rhs_terms,
            residual,
            fit: None,
            verdict: if residual >= 0.0 { Verdict::Pass } else { Verdict::Fail },
        }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.rhs_terms.iter().find(|t| t.name == name).map(|t| t.value)
    }

    pub fn deficit(&self) -> f64 {
        (-self.residual).max(0.0)
    }

    /// Residual recomputed from the stored terms.
    pub fn recompute_residual(&self) -> f64 {
        residual_of(self.lhs, &self.rhs_terms)
    }
}

fn residual_of(lhs: f64, rhs: &[RhsTerm]) -> f64 {
    canonical_sum(rhs.iter().map(|t| t.value)) - lhs
}

/// How a negative residual may still pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbsorptionRule {
    /// Deficits at most `SMALL_TERM_LIMIT` times the small-term regressor.
    SmallTerm,
    /// Deficits below `10·deficit(r_min) + 1`, or else as `SmallTerm`.
    BoundedOrSmallTerm,
}

/// Verdicts of one inequality over a radius sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub inequality_id: String,
    pub verdict: Verdict,
    /// `max deficit(r)/x(r)` over the sweep.
    pub dominating_coefficient: f64,
    pub sup_deficit: f64,
    pub bounded: bool,
    pub fit: Option<GrowthFit>,
}

/// Rows of one inequality over a sweep, ordered by radius, and their summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub rows: Vec<MarginReport>,
    pub summary: SweepSummary,
}

impl Sweep {
    /// Judges `rows` with [`judge_sweep`].
    pub fn judge(mut rows: Vec<MarginReport>, scale: &[f64], growth: &[f64], r0: f64, rule: AbsorptionRule) -> Self {
        let summary = judge_sweep(&mut rows, scale, growth, r0, rule);
        Sweep { rows, summary }
    }

    pub fn verdict(&self) -> Verdict {
        self.summary.verdict
    }
}

/// Assigns per-row verdicts and the sweep verdict.
///
/// `scale[i]` is the small-term regressor at row `i` and `growth[i]` the
/// characteristic it was built from, used for the least-squares fit attached
/// to every row when at least six radii are present.
pub fn judge_sweep(rows: &mut [MarginReport], scale: &[f64], growth: &[f64], r0: f64, rule: AbsorptionRule) -> SweepSummary {
    assert_eq!(rows.len(), scale.len());
    let id = rows.first().map(|r| r.inequality_id.clone()).unwrap_or_default();
    let deficits: Vec<f64> = rows.iter().map(MarginReport::deficit).collect();
    let sup = deficits.iter().copied().fold(0.0, f64::max);
    let first = deficits.first().copied().unwrap_or(0.0);
    let bound = 10.0 * first + 1.0;
    let bounded = sup < bound;
    let c_dom = deficits.iter().zip(scale).map(|(d, x)| d / x).fold(0.0, f64::max);
    let fit = if rows.len() >= MIN_FIT_RADII && growth.len() == rows.len() {
        let values: Vec<(f64, f64)> = rows.iter().zip(&deficits).map(|(r, d)| (r.radius, *d)).collect();
        let ts: Vec<(f64, f64)> = rows.iter().zip(growth).map(|(r, t)| (r.radius, *t)).collect();
        fit_small_term(&values, &ts, r0).ok()
    } else {
        None
    };
    for ((row, d), x) in rows.iter_mut().zip(&deficits).zip(scale) {
        row.fit = fit.clone();
        row.verdict = if row.residual >= 0.0 {
            Verdict::Pass
        } else if (rule == AbsorptionRule::BoundedOrSmallTerm && *d < bound) || d / x < SMALL_TERM_LIMIT {
            Verdict::PassWithSmallTerm
        } else {
            Verdict::Fail
        };
    }
    let verdict = if sup == 0.0 {
        Verdict::Pass
    } else if (rule == AbsorptionRule::BoundedOrSmallTerm && bounded) || c_dom < SMALL_TERM_LIMIT {
        Verdict::PassWithSmallTerm
    } else {
        Verdict::Fail
    };
    SweepSummary {
        inequality_id: id,
        verdict,
        dominating_coefficient: c_dom,
        sup_deficit: sup,
        bounded,
        fit,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(r: f64, lhs: f64, rhs: f64) -> MarginReport {
        MarginReport::new("t", r, r, lhs, vec![("a".into(), rhs)])
    }

    #[test]
    fn residual_matches_terms() {
        let r = MarginReport::new("x", 2.0, 2.0, 1.0, vec![("a".into(), 0.1), ("b".into(), 0.2), ("c".into(), 0.3)]);
        assert_eq!(r.residual.to_bits(), r.recompute_residual().to_bits());
    }

    #[test]
    fn sweep_rules() {
        let mut rows: Vec<_> = (2..10).map(|k| row(k as f64, 0.0, 1.0)).collect();
        let x = vec![1.0; 8];
        assert_eq!(judge_sweep(&mut rows, &x, &[], f64::INFINITY, AbsorptionRule::SmallTerm).verdict, Verdict::Pass);

        let mut rows: Vec<_> = (2..10).map(|k| row(k as f64, 5.0, 1.0)).collect();
        let s = judge_sweep(&mut rows, &x, &[], f64::INFINITY, AbsorptionRule::SmallTerm);
        assert_eq!(s.verdict, Verdict::PassWithSmallTerm);
        assert_eq!(s.dominating_coefficient, 4.0);

        let mut rows: Vec<_> = (2..10).map(|k| row(k as f64, 1e4 * (k * k) as f64, 0.0)).collect();
        let s = judge_sweep(&mut rows, &x, &[], f64::INFINITY, AbsorptionRule::BoundedOrSmallTerm);
        assert_eq!(s.verdict, Verdict::Fail);
        assert!(rows.iter().any(|r| r.verdict == Verdict::Fail));
    }

    #[test]
    fn bounded_violation_passes() {
        let mut rows: Vec<_> = (2..10).map(|k| row(k as f64, 500.0 + (k % 3) as f64, 0.0)).collect();
        let x = vec![1.0; 8];
        let s = judge_sweep(&mut rows, &x, &[], f64::INFINITY, AbsorptionRule::BoundedOrSmallTerm);
        assert!(s.bounded);
        assert_eq!(s.verdict, Verdict::PassWithSmallTerm);
    }

    #[test]
    fn verdict_json_names() {
        assert_eq!(serde_json::to_string(&Verdict::PassWithSmallTerm).unwrap(), "\"pass_with_small_term\"");
    }
}
