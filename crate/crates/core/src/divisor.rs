//! Divisors: finitely many annulus points with nonzero integer multiplicities.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scalar::{cluster_radius, polar_order, ComplexScalar};

/// Default merge radius, relative to `1+|z|`.
pub const DEFAULT_CLUSTER_REL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TruncationLevel {
    Finite(u32),
    Infinite,
}

impl TruncationLevel {
    pub fn apply(self, m: i64) -> i64 {
        match self {
            TruncationLevel::Finite(l) => m.min(l as i64),
            TruncationLevel::Infinite => m,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == TruncationLevel::Infinite
    }

    /// `l` as a real number; `∞` for the infinite level.
    pub fn as_f64(self) -> f64 {
        match self {
            TruncationLevel::Finite(l) => l as f64,
            TruncationLevel::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for TruncationLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TruncationLevel::Finite(l) => write!(f, "{l}"),
            TruncationLevel::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for TruncationLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(TruncationLevel::Infinite),
            t => match t.parse::<u32>() {
                Ok(l) if l >= 1 => Ok(TruncationLevel::Finite(l)),
                _ => Err(format!("truncation level must be a positive integer or 'inf', got '{t}'")),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivisorPoint {
    pub location: ComplexScalar,
    pub multiplicity: i64,
}

/// Points sorted by modulus then argument; complete on `1/valid_outer ≤ |z| ≤ valid_outer`.
#[derive(Debug, Clone, PartialEq)]
pub struct Divisor {
    points: Vec<DivisorPoint>,
    valid_outer: f64,
    cluster_rel: f64,
}

impl Divisor {
    pub fn new(valid_outer: f64) -> Self {
        Divisor {
            points: Vec::new(),
            valid_outer,
            cluster_rel: DEFAULT_CLUSTER_REL,
        }
    }

    pub fn with_cluster_rel(valid_outer: f64, cluster_rel: f64) -> Self {
        Divisor {
            cluster_rel,
            ..Self::new(valid_outer)
        }
    }

    pub fn from_points(valid_outer: f64, points: impl IntoIterator<Item = (ComplexScalar, i64)>) -> Self {
        let mut d = Self::new(valid_outer);
        for (z, m) in points {
            d.insert(z, m);
        }
        d
    }

    /// Adds `m` at `z`, merging with a stored point inside the clustering radius.
    pub fn insert(&mut self, z: ComplexScalar, m: i64) {
        if m == 0 {
            return;
        }
        let rel = self.cluster_rel;
        if let Some(i) = self
            .points
            .iter()
            .position(|p| (p.location - z).norm() <= cluster_radius(p.location, rel))
        {
            let p = &mut self.points[i];
            let total = p.multiplicity + m;
            if total == 0 {
                self.points.remove(i);
            } else {
                if m > 0 && p.multiplicity > 0 {
                    p.location = (p.location * p.multiplicity as f64 + z * m as f64) / total as f64;
                }
                p.multiplicity = total;
            }
            return;
        }
        let at = self
            .points
            .partition_point(|p| polar_order(p.location, z) == std::cmp::Ordering::Less);
        self.points.insert(at, DivisorPoint { location: z, multiplicity: m });
    }

    pub fn points(&self) -> &[DivisorPoint] {
        &self.points
    }

    pub fn valid_outer(&self) -> f64 {
        self.valid_outer
    }

    pub fn set_valid_outer(&mut self, outer: f64) {
        self.valid_outer = outer;
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn degree(&self) -> i64 {
        self.points.iter().map(|p| p.multiplicity).sum()
    }

    fn map(&self, f: impl Fn(i64) -> i64) -> Self {
        Divisor {
            points: self
                .points
                .iter()
                .map(|p| DivisorPoint {
                    location: p.location,
                    multiplicity: f(p.multiplicity),
                })
                .filter(|p| p.multiplicity != 0)
                .collect(),
            ..self.clone()
        }
    }

    /// `min(M, ν)` at every point.
    pub fn truncate(&self, level: TruncationLevel) -> Self {
        self.map(|m| level.apply(m))
    }

    /// Points of multiplicity at least `k`, kept with full multiplicity.
    pub fn filter_at_least(&self, k: i64) -> Self {
        self.map(|m| if m >= k { m } else { 0 })
    }

    /// Points with `1/outer ≤ |z| ≤ outer`.
    pub fn restrict(&self, outer: f64) -> Self {
        Divisor {
            points: self
                .points
                .iter()
                .filter(|p| {
                    let m = p.location.norm();
                    m <= outer && m >= 1.0 / outer
                })
                .copied()
                .collect(),
            valid_outer: self.valid_outer.min(outer),
            cluster_rel: self.cluster_rel,
        }
    }

    /// Pointwise sum; valid where both summands are.
    pub fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.valid_outer = self.valid_outer.min(other.valid_outer);
        for p in &other.points {
            out.insert(p.location, p.multiplicity);
        }
        out
    }

    pub fn negate(&self) -> Self {
        self.map(|m| -m)
    }

    /// Same multiplicities at locations matched within `rel·(1+|z|)`.
    pub fn approx_eq(&self, other: &Self, rel: f64) -> bool {
        self.points.len() == other.points.len()
            && self.points.iter().all(|p| {
                other.points.iter().any(|q| {
                    q.multiplicity == p.multiplicity
                        && (q.location - p.location).norm() <= cluster_radius(p.location, rel)
                })
            })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.points
                .iter()
                .map(|p| {
                    serde_json::json!({
                        "re": p.location.re,
                        "im": p.location.im,
                        "mult": p.multiplicity,
                    })
                })
                .collect(),
        )
    }
}
