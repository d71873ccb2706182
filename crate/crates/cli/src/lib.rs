//! Configuration, orchestration and report emission for the `nevan` tool.

pub mod config;
pub mod jobs;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde_json::json;

use nevan_core::report::Verdict;

pub use config::{Command, Job, JobConfig, Overrides, RadiiSpec};

pub const MANIFEST_SCHEMA: u32 = 1;
pub const MANIFEST: &str = "manifest.json";
pub const REPORT: &str = "report.json";
pub const TIMING: &str = "timing.json";

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub verdict: Option<Verdict>,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    /// 0 unless some verdict failed, then 2.
    pub fn exit_code(&self) -> u8 {
        match self.verdict {
            Some(Verdict::Fail) => 2,
            _ => 0,
        }
    }
}

/// Runs `config` and writes its tables, report, manifest and timings into `out`.
pub fn run(config: &JobConfig, out: &Path) -> Result<RunOutcome> {
    let start = Instant::now();
    let job = config.resolve()?;
    let echo = config.normalized()?;
    let resolved = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let result = jobs::execute(&job)?;
    let computed = start.elapsed().as_secs_f64();

    let start = Instant::now();
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut names: Vec<String> = Vec::new();
    let mut write = |name: &str, contents: &str| -> Result<()> {
        let path = out.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        names.push(name.to_string());
        Ok(())
    };
    for (name, contents) in &result.files {
        write(name, contents)?;
    }
    write(REPORT, &output::json(&result.report))?;
    let mut outputs: Vec<String> = result.files.iter().map(|f| f.0.clone()).collect();
    outputs.extend([REPORT.to_string(), TIMING.to_string()]);
    let manifest = json!({
        "schema_version": MANIFEST_SCHEMA,
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": job.command.name(),
        "config": echo,
        "radii": job.radii,
        "adjusted_radii": result.adjusted_radii,
        "verdict": result.verdict,
        "warnings": result.warnings,
        "outputs": outputs,
        "timing": TIMING,
    });
    write(MANIFEST, &output::json(&manifest))?;
    let written = start.elapsed().as_secs_f64();
    let timing = json!({
        "phases": { "resolve": resolved, "compute": computed, "write": written },
    });
    write(TIMING, &output::json(&timing))?;

    Ok(RunOutcome {
        verdict: result.verdict,
        files: names.iter().map(|n| out.join(n)).collect(),
    })
}
