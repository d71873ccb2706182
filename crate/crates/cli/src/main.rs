use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::Parser;

use nevan_cli::{Command, JobConfig, Overrides, RadiiSpec};

/// Numerical checks of value-distribution inequalities on annuli.
#[derive(Debug, Parser)]
#[command(name = "nevan", version)]
struct Cli {
    /// Job to run; overrides `command` in the configuration file.
    #[arg(value_enum)]
    command: Option<Command>,
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Geometric schedule `a:b:n` or a comma-separated list.
    #[arg(long)]
    radii: Option<RadiiSpec>,
    /// Outer radius of the annulus, a number above 1 or `inf`.
    #[arg(long)]
    r0: Option<String>,
    #[arg(long)]
    tol_quad: Option<f64>,
    /// Truncation level, a positive integer or `inf`.
    #[arg(long)]
    level: Option<String>,
    /// Named expression `NAME=TEXT`; repeatable.
    #[arg(long = "expr", value_parser = named_expression)]
    expressions: Vec<(String, String)>,
    /// Target value or expression, `inf` for infinity; repeatable.
    #[arg(long = "target", allow_hyphen_values = true)]
    targets: Vec<String>,
    /// Element of the value set; repeatable.
    #[arg(long = "set", allow_hyphen_values = true)]
    set: Vec<String>,
    /// Candidate function of the sharing check; repeatable.
    #[arg(long = "candidate", allow_hyphen_values = true)]
    candidates: Vec<String>,
}

fn named_expression(s: &str) -> Result<(String, String)> {
    let (name, text) = s.split_once('=').ok_or_else(|| anyhow!("expected NAME=TEXT, got '{s}'"))?;
    Ok((name.trim().to_string(), text.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn execute(cli: Cli) -> Result<u8> {
    let mut config = match &cli.config {
        Some(path) => JobConfig::load(path)?,
        None => JobConfig::default(),
    };
    config.apply(&Overrides {
        command: cli.command,
        seed: cli.seed,
        radii: cli.radii,
        r0: cli.r0,
        tol_quad: cli.tol_quad,
        level: cli.level,
        expressions: cli.expressions,
        targets: cli.targets,
        set: cli.set,
        candidates: cli.candidates,
    });
    let outcome = nevan_cli::run(&config, &cli.out)?;
    if let Some(v) = outcome.verdict {
        println!("{}: {}", config.command.map(|c| c.name()).unwrap_or_default(), v.label());
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(outcome.exit_code())
}
