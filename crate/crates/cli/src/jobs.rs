//! One function per command: compute, tabulate, judge.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use nevan_core::divisor::TruncationLevel;
use nevan_core::functionals::{counting, jensen_residual, Characteristic, Profile};
use nevan_core::growth;
use nevan_core::locate::divisors;
use nevan_core::rational::RationalFn;
use nevan_core::report::{Sweep, Verdict};
use nevan_core::sample::{random_rational, rng};
use nevan_core::sharing::{build_theorem13_objects, check_bound_31_32, evaluate_bound, shares_set};
use nevan_core::suite::{check_smt_constants, check_smt_moving};
use nevan_core::transforms::{build_l31, build_l32, check_claim38, check_transform_bounds};
use nevan_core::MeroExpr;

use crate::config::{Command, Job};
use crate::output::{float, sweep_table, Table};

/// Largest Jensen residual counted as a pass.
pub const JENSEN_LIMIT: f64 = 1e-6;
/// Degree bound of the seeded random rational functions.
pub const RANDOM_DEGREE: usize = 6;

#[derive(Debug, Clone)]
pub struct JobOutput {
    /// `(file name, contents)` in emission order.
    pub files: Vec<(String, String)>,
    pub report: Value,
    /// `None` for jobs without a pass/fail notion.
    pub verdict: Option<Verdict>,
    pub warnings: Vec<String>,
    /// Contour radius actually used per requested radius, keyed by table.
    pub adjusted_radii: BTreeMap<String, Vec<f64>>,
}

impl JobOutput {
    fn new(report: Value, verdict: Option<Verdict>) -> Self {
        JobOutput {
            files: Vec::new(),
            report,
            verdict,
            warnings: Vec::new(),
            adjusted_radii: BTreeMap::new(),
        }
    }

    fn table(&mut self, name: &str, t: &Table) {
        self.files.push((format!("{name}.csv"), t.render()));
    }

    fn sweeps(&mut self, sweeps: &[Sweep]) {
        for s in sweeps {
            let id = s.summary.inequality_id.clone();
            self.table(&id, &sweep_table(s));
            self.adjusted(&id, s.rows.iter().map(|r| (r.radius, r.adjusted_radius)));
            if let Some(fit) = &s.summary.fit {
                self.warnings.push(format!(
                    "fit {id}: {:?} coefficient {} rms {}",
                    fit.model, fit.coefficient, fit.residual_rms
                ));
            }
        }
    }

    fn adjusted(&mut self, id: &str, pairs: impl Iterator<Item = (f64, f64)>) {
        let mut rho = Vec::new();
        for (r, a) in pairs {
            if a != r {
                self.warnings.push(format!("{id}: contour at r = {r} moved to {a}"));
            }
            rho.push(a);
        }
        self.adjusted_radii.insert(id.to_string(), rho);
    }
}

pub fn execute(job: &Job) -> Result<JobOutput> {
    match job.command {
        Command::Analyze => analyze(job),
        Command::Jensen => jensen(job),
        Command::SmtConst => {
            let s = check_smt_constants(job.expr("f")?, &job.targets, &job.radii, &job.settings)?;
            Ok(sweep_output(job, vec![s], Vec::new()))
        }
        Command::SmtMoving => {
            let s = check_smt_moving(job.expr("g")?, &job.targets, &job.radii, &job.settings)?;
            let note = "small-term regressor uses T(g) + sum of T(a_i)".to_string();
            Ok(sweep_output(job, vec![s], vec![note]))
        }
        Command::Lemma31 | Command::Lemma32 => transform(job),
        Command::Claim38 => {
            let s = check_claim38(job.expr("f")?, job.expr("b1")?, job.expr("b2")?, &job.radii, &job.settings)?;
            let note = "claim38: uses the constant 35 of the statement".to_string();
            Ok(sweep_output(job, vec![s], vec![note]))
        }
        Command::Sharing => sharing(job),
        Command::BoundTable => Ok(bound_table(job)),
    }
}

fn expressions_json(job: &Job) -> Value {
    job.expressions
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.to_string())))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

fn sweep_output(job: &Job, sweeps: Vec<Sweep>, notes: Vec<String>) -> JobOutput {
    let verdict = Verdict::worst(sweeps.iter().map(Sweep::verdict));
    let report = json!({
        "command": job.command.name(),
        "expressions": expressions_json(job),
        "targets": job.targets.iter().map(|t| t.label()).collect::<Vec<_>>(),
        "verdict": verdict,
        "sweeps": sweeps,
    });
    let mut out = JobOutput::new(report, Some(verdict));
    out.sweeps(&sweeps);
    out.warnings.extend(notes);
    out
}

fn analyze(job: &Job) -> Result<JobOutput> {
    let f = job.expr("f")?;
    let max = *job.radii.last().unwrap();
    let profile = Profile::new(f.clone(), job.settings, max);
    let chars: Vec<Characteristic> = job
        .radii
        .par_iter()
        .map(|&r| profile.characteristic(r))
        .collect::<nevan_core::Result<_>>()?;
    let poles = profile.poles()?.clone();
    let zeros = if f.is_identically_zero() {
        None
    } else {
        Some(divisors(f, profile.outer(), &job.settings.tol)?.0)
    };
    let mut t = Table::new(["r", "adjusted_r", "kind", "truncation", "value", "quad_error"]);
    for c in &chars {
        let rho = c.total.adjusted_radius;
        let nbar = counting(&poles, rho, TruncationLevel::Finite(1))?;
        for v in [c.pole_count, nbar, c.proximity, c.total] {
            t.push(vec![
                float(c.total.radius),
                float(v.adjusted_radius),
                v.kind.label().into(),
                v.truncation.to_string(),
                float(v.value),
                float(v.quad_error),
            ]);
        }
    }
    let admissibility = if job.radii.len() >= growth::MIN_ADMISSIBILITY_RADII {
        let samples: Vec<(f64, f64)> = chars.iter().map(|c| (c.total.radius, c.total.value)).collect();
        growth::classify_admissible(&samples, job.settings.r0).ok()
    } else {
        None
    };
    let report = json!({
        "command": "analyze",
        "expressions": expressions_json(job),
        "characteristics": chars,
        "poles": poles.to_json(),
        "zeros": zeros.map(|z| z.to_json()),
        "admissibility": admissibility,
    });
    let mut out = JobOutput::new(report, None);
    out.table("functionals", &t);
    out.adjusted("functionals", chars.iter().map(|c| (c.total.radius, c.total.adjusted_radius)));
    Ok(out)
}

fn jensen(job: &Job) -> Result<JobOutput> {
    let cases: Vec<(String, RationalFn)> = match job.expressions.get("f") {
        Some(f) => vec![(f.to_string(), f.to_rational().context("expressions.f")?)],
        None if job.jensen_cases > 0 => {
            let mut r = rng(job.settings.seed);
            (0..job.jensen_cases)
                .map(|_| {
                    let f = random_rational(&mut r, RANDOM_DEGREE).function;
                    (MeroExpr::rational(f.clone()).to_string(), f)
                })
                .collect()
        }
        None => bail!("expressions.f: required by jensen unless jensen_cases > 0"),
    };
    let checks: Vec<Vec<_>> = cases
        .par_iter()
        .map(|(_, f)| job.radii.iter().map(|&r| jensen_residual(f, r, &job.settings)).collect())
        .collect::<Vec<nevan_core::Result<Vec<_>>>>()
        .into_iter()
        .collect::<nevan_core::Result<_>>()?;
    let mut t = Table::new([
        "case",
        "r",
        "adjusted_r",
        "counting_side",
        "integral_side",
        "residual",
        "quad_error",
    ]);
    let mut worst: f64 = 0.0;
    let mut out_adjusted = Vec::new();
    for (i, rows) in checks.iter().enumerate() {
        for c in rows {
            worst = worst.max(c.residual);
            out_adjusted.push((c.radius, c.adjusted_radius));
            t.push(vec![
                i.to_string(),
                float(c.radius),
                float(c.adjusted_radius),
                float(c.counting_side),
                float(c.integral_side),
                float(c.residual),
                float(c.quad_error),
            ]);
        }
    }
    let verdict = if worst < JENSEN_LIMIT { Verdict::Pass } else { Verdict::Fail };
    let report = json!({
        "command": "jensen",
        "cases": cases.iter().map(|c| c.0.clone()).collect::<Vec<_>>(),
        "max_residual": worst,
        "limit": JENSEN_LIMIT,
        "verdict": verdict,
        "checks": checks,
    });
    let mut out = JobOutput::new(report, Some(verdict));
    out.table("jensen", &t);
    out.adjusted("jensen", out_adjusted.into_iter());
    Ok(out)
}

fn transform(job: &Job) -> Result<JobOutput> {
    let f1 = job.expr("f1")?;
    let (t, note) = if job.command == Command::Lemma31 {
        let a = job.target_exprs(3)?;
        (build_l31(f1, &a[0], &a[1], &a[2])?, None)
    } else {
        let a = job.target_exprs(4)?;
        let note = "lemma32 (c): no explicit constant term; bounded-violation rule applied".to_string();
        (build_l32(f1, &a[0], &a[1], &a[2], &a[3])?, Some(note))
    };
    let sweeps = check_transform_bounds(&t, &job.radii, &job.settings)?;
    let mut out = sweep_output(job, sweeps, note.into_iter().collect());
    if let Value::Object(m) = &mut out.report {
        m.insert("f2".into(), Value::String(t.f2.to_string()));
        m.insert("b".into(), Value::String(t.b.to_string()));
    }
    Ok(out)
}

fn sharing(job: &Job) -> Result<JobOutput> {
    let g = job.expr("g")?;
    let set = job.set.as_ref().ok_or_else(|| anyhow!("set: required by sharing"))?;
    if job.candidates.is_empty() {
        bail!("candidates: required by sharing");
    }
    let check = check_bound_31_32(&job.candidates, g, set, job.level, &job.radii, &job.settings)?;
    let objects = build_theorem13_objects(&job.candidates, g, set)?;
    let outer = Profile::new(g.clone(), job.settings, *job.radii.last().unwrap()).outer();
    let instances = job
        .candidates
        .par_iter()
        .map(|f| shares_set(f, g, set, job.level, outer, &job.settings))
        .collect::<nevan_core::Result<Vec<_>>>()?;
    let c = &check.chain;
    let mut t = Table::new([
        "j",
        "r",
        "adjusted_r",
        "shares",
        "lower_lhs",
        "lower_rhs",
        "lower_verdict",
        "upper_lhs",
        "upper_rhs",
        "upper_verdict",
        "chain_lhs",
        "chain_rhs",
        "threshold",
        "satisfied",
    ]);
    for (j, (sweep, inst)) in check.lower.iter().zip(&instances).enumerate() {
        for (row, up) in sweep.rows.iter().zip(&check.upper.rows) {
            t.push(vec![
                (j + 1).to_string(),
                float(row.radius),
                float(row.adjusted_radius),
                inst.shares.to_string(),
                float(row.lhs),
                float(row.rhs_terms[0].value),
                row.verdict.label().into(),
                float(up.lhs),
                float(up.rhs_terms[0].value),
                up.verdict.label().into(),
                float(c.lhs),
                float(c.rhs),
                float(check.bound.threshold),
                check.bound.satisfied.to_string(),
            ]);
        }
    }
    let mut sweeps = check.lower.clone();
    sweeps.push(check.upper.clone());
    let verdict = Verdict::worst(sweeps.iter().map(Sweep::verdict));
    let report = json!({
        "command": "sharing",
        "expressions": expressions_json(job),
        "set": set.values().iter().map(|v| [v.re, v.im]).collect::<Vec<_>>(),
        "level": job.level.to_string(),
        "candidates": job.candidates.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "shares": instances.iter().map(|i| json!({
            "shares": i.shares,
            "f_sum": i.f_sum.to_json(),
            "g_sum": i.g_sum.to_json(),
        })).collect::<Vec<_>>(),
        "phi": objects.phi.to_string(),
        "psi": objects.psi.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "alpha": objects.alpha.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "identity_error": objects.max_identity_error,
        "chain": check.chain,
        "bound": check.bound,
        "verdict": verdict,
        "sweeps": sweeps,
    });
    let mut out = JobOutput::new(report, Some(verdict));
    out.table("sharing", &t);
    for s in &sweeps {
        let id = s.summary.inequality_id.clone();
        out.adjusted(&id, s.rows.iter().map(|r| (r.radius, r.adjusted_radius)));
    }
    out.warnings.push(format!(
        "chain: closing inequality gives threshold {}, stated threshold {}",
        c.solved_threshold, c.stated_threshold
    ));
    out.warnings
        .push("uniqueness of P_S is assumed, not certified; any number of candidates accepted".into());
    Ok(out)
}

fn bound_table(job: &Job) -> JobOutput {
    let mut t = Table::new(["q", "k", "l", "threshold", "satisfied", "vacuous"]);
    let mut cells = Vec::new();
    for &k in &job.bound_k {
        for &l in &job.bound_levels {
            let b = evaluate_bound(job.bound_q, k, l);
            t.push(vec![
                b.q.to_string(),
                b.k.to_string(),
                b.level.to_string(),
                float(b.threshold),
                b.satisfied.to_string(),
                b.vacuous.to_string(),
            ]);
            cells.push(b);
        }
    }
    let report = json!({ "command": "bound-table", "rows": cells });
    let mut out = JobOutput::new(report, None);
    out.table("bound_table", &t);
    out
}
