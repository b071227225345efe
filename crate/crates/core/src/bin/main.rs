use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use yukawa_lab::config::{run, CheckRequest, RunConfig, RunScope};
use yukawa_lab::report::{emit, Formats, Outcome, Report};
use yukawa_lab::Result;

#[derive(Parser)]
#[command(name = "yukawa-lab", version, about = "Solve Yukawa-type equations on the unit ball and check inequalities numerically")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Solve the configured problems.
    Solve(Common),
    /// Solve, then evaluate the configured functionals.
    Norms(Common),
    /// Solve, then run the configured theorem checks.
    Verify(Common),
    /// Run everything and write CSV tables and SVG plots next to the JSON.
    Report(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML, or JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Restrict checks to this theorem id; without a config, runs its preset.
    #[arg(long)]
    theorem: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
}

fn load(c: &Common) -> Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(w) = c.workers {
        cfg.workers = Some(w);
    }
    if let Some(out) = &c.out {
        cfg.out = out.display().to_string();
    }
    if let Some(theorem) = &c.theorem {
        cfg.checks.retain(|k| &k.theorem == theorem);
        if cfg.checks.is_empty() {
            cfg.checks.push(CheckRequest::preset(theorem)?);
        }
    }
    Ok(cfg)
}

fn summarize(report: &Report) {
    for item in &report.items {
        let line = match &item.outcome {
            Outcome::Verdict(v) => format!(
                "{:<8} {} [{}] max_violation={:e} tol={:e}",
                format!("{:?}", v.status).to_uppercase(),
                item.id,
                v.theorem,
                v.max_violation.0,
                v.tolerance
            ),
            Outcome::Solution(m) => format!(
                "SOLVED   {} backend={} iterations={} residual={:e} converged={}",
                item.id,
                m.backend.label(),
                m.iterations,
                m.residual,
                m.converged
            ),
            Outcome::Norm(n) => format!("NORM     {} value={:e}", item.id, n.value),
            Outcome::Means { rows, .. } => format!("MEANS    {} rows={}", item.id, rows.len()),
            Outcome::Energy(e) => format!("ENERGY   {} value={:e} finite={}", item.id, e.value, e.finite),
            Outcome::Error { kind, message } => format!("ERROR    {} ({kind}): {message}", item.id),
        };
        println!("{line}");
    }
}

fn execute(verb: &Verb) -> Result<i32> {
    let (common, scope, formats) = match verb {
        Verb::Solve(c) => (c, RunScope { functionals: false, checks: false }, None),
        Verb::Norms(c) => (c, RunScope { functionals: true, checks: false }, None),
        Verb::Verify(c) => (c, RunScope { functionals: false, checks: true }, None),
        Verb::Report(c) => (c, RunScope::ALL, Some(Formats::default())),
    };
    let cfg = load(common)?;
    let report = run(&cfg, scope)?;
    let formats = formats.unwrap_or(Formats { csv: false, svg: false });
    let written = emit(&report, std::path::Path::new(&cfg.out), formats)?;
    summarize(&report);
    eprintln!("wrote {} file(s) under {}", written.len(), cfg.out);
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.verb) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
