//! Job configuration: TOML file, flag overrides and validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use nevan_core::divisor::TruncationLevel;
use nevan_core::expr::parse_expression;
use nevan_core::settings::{finite_radii, geometric_radii, Settings, Tolerances};
use nevan_core::sharing::FiniteSet;
use nevan_core::suite::Target;
use nevan_core::{ComplexScalar, MeroExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Analyze,
    Jensen,
    SmtConst,
    SmtMoving,
    Lemma31,
    Lemma32,
    Claim38,
    Sharing,
    BoundTable,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Jensen => "jensen",
            Command::SmtConst => "smt-const",
            Command::SmtMoving => "smt-moving",
            Command::Lemma31 => "lemma31",
            Command::Lemma32 => "lemma32",
            Command::Claim38 => "claim38",
            Command::Sharing => "sharing",
            Command::BoundTable => "bound-table",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Explicit radii or a geometric schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RadiiSpec {
    List(Vec<f64>),
    Schedule { min: f64, max: f64, count: usize },
}

impl std::str::FromStr for RadiiSpec {
    type Err = anyhow::Error;

    /// `a:b:n`, or a comma-separated list.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() == 3 {
            return Ok(RadiiSpec::Schedule {
                min: parts[0].trim().parse().context("radius schedule start")?,
                max: parts[1].trim().parse().context("radius schedule end")?,
                count: parts[2].trim().parse().context("radius schedule count")?,
            });
        }
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| anyhow!("radius '{t}': {e}")))
            .collect::<Result<_>>()
            .map(RadiiSpec::List)
    }
}

/// `R₀` as a number or the text `inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OuterRadius {
    Value(f64),
    Text(String),
}

impl OuterRadius {
    fn resolve(&self) -> Result<f64> {
        let r0 = match self {
            OuterRadius::Value(x) => *x,
            OuterRadius::Text(t) => match t.trim() {
                "inf" | "infinity" | "∞" => f64::INFINITY,
                other => other.parse().map_err(|_| anyhow!("r0: expected a number or 'inf', got '{other}'"))?,
            },
        };
        if !(r0 > 1.0) {
            bail!("r0: must exceed 1, got {r0}");
        }
        Ok(r0)
    }

    fn normalized(&self) -> Result<OuterRadius> {
        let r0 = self.resolve()?;
        Ok(if r0.is_infinite() {
            OuterRadius::Text("inf".into())
        } else {
            OuterRadius::Value(r0)
        })
    }
}

impl Default for OuterRadius {
    fn default() -> Self {
        OuterRadius::Text("inf".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundTableSpec {
    pub q: usize,
    pub k: Vec<usize>,
    pub levels: Vec<String>,
}

impl Default for BoundTableSpec {
    fn default() -> Self {
        BoundTableSpec {
            q: 7,
            k: vec![1, 2, 3],
            levels: vec!["88".into(), "100".into(), "inf".into()],
        }
    }
}

/// Contents of a configuration file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JobConfig {
    pub command: Option<Command>,
    pub seed: u64,
    pub r0: OuterRadius,
    pub radii: Option<RadiiSpec>,
    pub level: Option<String>,
    /// Named expressions: `f`, `g`, `f1`, `b1`, `b2`.
    pub expressions: BTreeMap<String, String>,
    /// Target values: `inf` or expressions.
    pub targets: Vec<String>,
    /// Elements of the value set `S`.
    pub set: Vec<String>,
    /// Candidate functions `f_j` of the sharing check.
    pub candidates: Vec<String>,
    /// Seeded random rational functions of the `jensen` job when no `f` is given.
    pub jensen_cases: usize,
    pub tolerances: Tolerances,
    pub bound_table: BoundTableSpec,
}

/// Command-line values that replace configuration entries.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    pub radii: Option<RadiiSpec>,
    pub r0: Option<String>,
    pub tol_quad: Option<f64>,
    pub level: Option<String>,
    pub expressions: Vec<(String, String)>,
    pub targets: Vec<String>,
    pub set: Vec<String>,
    pub candidates: Vec<String>,
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(c) = o.command {
            self.command = Some(c);
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(r) = &o.radii {
            self.radii = Some(r.clone());
        }
        if let Some(r0) = &o.r0 {
            self.r0 = OuterRadius::Text(r0.clone());
        }
        if let Some(t) = o.tol_quad {
            self.tolerances.quad = t;
        }
        if let Some(l) = &o.level {
            self.level = Some(l.clone());
        }
        for (name, text) in &o.expressions {
            self.expressions.insert(name.clone(), text.clone());
        }
        if !o.targets.is_empty() {
            self.targets = o.targets.clone();
        }
        if !o.set.is_empty() {
            self.set = o.set.clone();
        }
        if !o.candidates.is_empty() {
            self.candidates = o.candidates.clone();
        }
    }

    /// Copy with `r0` in canonical form, for the manifest echo.
    pub fn normalized(&self) -> Result<JobConfig> {
        let mut c = self.clone();
        c.r0 = self.r0.normalized()?;
        Ok(c)
    }

    pub fn resolve(&self) -> Result<Job> {
        let command = self.command.ok_or_else(|| anyhow!("command: missing"))?;
        let r0 = self.r0.resolve()?;
        let tol = self.tolerances;
        for (name, v) in [
            ("quad", tol.quad),
            ("identity", tol.identity),
            ("clustering", tol.clustering),
            ("clearance", tol.clearance),
            ("gcd", tol.gcd),
        ] {
            if !(v > 0.0 && v < 1.0) {
                bail!("tolerances.{name}: must lie in (0, 1), got {v}");
            }
        }
        let settings = Settings { r0, tol, seed: self.seed };
        let radii = match &self.radii {
            None if r0.is_infinite() => geometric_radii(2.0, 50.0, 12),
            None => finite_radii(r0, 10),
            Some(RadiiSpec::List(v)) => v.clone(),
            Some(RadiiSpec::Schedule { min, max, count }) => {
                let (min, max, count) = (*min, *max, *count);
                if count < 2 {
                    bail!("radii.count: must be at least 2, got {count}");
                }
                if !(min < max) {
                    bail!("radii.min: must be below radii.max");
                }
                geometric_radii(min, max, count)
            }
        };
        settings.check_radii(&radii).map_err(|e| anyhow!("radii: {e}"))?;
        let level = match &self.level {
            None => TruncationLevel::Infinite,
            Some(t) => t.parse().map_err(|e| anyhow!("level: {e}"))?,
        };
        let mut expressions = BTreeMap::new();
        for (name, text) in &self.expressions {
            expressions.insert(name.clone(), parse(text).with_context(|| format!("expressions.{name}"))?);
        }
        let targets = self
            .targets
            .iter()
            .enumerate()
            .map(|(i, t)| parse_target(t).with_context(|| format!("targets[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let set = if self.set.is_empty() {
            None
        } else {
            let values = self
                .set
                .iter()
                .enumerate()
                .map(|(i, t)| parse_constant(t).with_context(|| format!("set[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Some(FiniteSet::new(values).map_err(|e| anyhow!("set: {e}"))?)
        };
        let candidates = self
            .candidates
            .iter()
            .enumerate()
            .map(|(i, t)| parse(t).with_context(|| format!("candidates[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let mut bound_levels = Vec::new();
        for (i, l) in self.bound_table.levels.iter().enumerate() {
            bound_levels.push(l.parse().map_err(|e| anyhow!("bound_table.levels[{i}]: {e}"))?);
        }
        Ok(Job {
            command,
            settings,
            radii,
            level,
            expressions,
            targets,
            set,
            candidates,
            jensen_cases: self.jensen_cases,
            bound_q: self.bound_table.q,
            bound_k: self.bound_table.k.clone(),
            bound_levels,
        })
    }
}

fn parse(text: &str) -> Result<MeroExpr> {
    parse_expression(text).map_err(|e| anyhow!("{e}"))
}

fn parse_target(text: &str) -> Result<Target> {
    match text.trim() {
        "inf" | "infinity" | "∞" => Ok(Target::Infinity),
        t => Ok(Target::Function(parse(t)?)),
    }
}

fn parse_constant(text: &str) -> Result<ComplexScalar> {
    parse(text)?
        .as_constant()
        .ok_or_else(|| anyhow!("'{text}' is not a constant"))
}

/// A validated job.
#[derive(Debug, Clone)]
pub struct Job {
    pub command: Command,
    pub settings: Settings,
    pub radii: Vec<f64>,
    pub level: TruncationLevel,
    pub expressions: BTreeMap<String, MeroExpr>,
    pub targets: Vec<Target>,
    pub set: Option<FiniteSet>,
    pub candidates: Vec<MeroExpr>,
    pub jensen_cases: usize,
    pub bound_q: usize,
    pub bound_k: Vec<usize>,
    pub bound_levels: Vec<TruncationLevel>,
}

impl Job {
    pub fn expr(&self, name: &str) -> Result<&MeroExpr> {
        self.expressions
            .get(name)
            .ok_or_else(|| anyhow!("expressions.{name}: required by {}", self.command))
    }

    pub fn target_exprs(&self, count: usize) -> Result<Vec<MeroExpr>> {
        if self.targets.len() != count {
            bail!("targets: {} needs exactly {count} targets, got {}", self.command, self.targets.len());
        }
        self.targets
            .iter()
            .enumerate()
            .map(|(i, t)| match t {
                Target::Function(e) => Ok(e.clone()),
                Target::Infinity => Err(anyhow!("targets[{i}]: {} needs finite targets", self.command)),
            })
            .collect()
    }
}
