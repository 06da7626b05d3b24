//! `rellich` — batch driver for the inequality verification toolkit.
//!
//! Subcommands run margin checks, sharpness sweeps, duality probes,
//! distributional identity checks, and constant tables, writing one CSV
//! table and one JSON summary per suite. A TOML config file can batch
//! many suites; identical configs produce byte-identical CSV output.
//!
//! Exit status: 0 when every suite passed, 1 when any suite failed (a
//! machine-readable failure list goes to stdout), 2 on configuration or
//! I/O errors (reported before any computation runs).

mod config;
mod exec;
mod output;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{Expectation, SuiteCommand, SuiteSpec, Which};
use exec::SuiteOutcome;
use rellich_core::sharpness::CutoffVariant;

#[derive(Parser)]
#[command(
    name = "rellich",
    version,
    about = "Verify curvature-improved Hardy and Rellich inequalities on model spaces"
)]
struct Cli {
    /// Directory for CSV/JSON artifacts (default: $RELLICH_OUT_DIR, then `.`).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one inequality margin for a radial profile.
    Verify(VerifyArgs),
    /// Sweep the truncation radius and extrapolate to the sharp constant.
    Sweep(SweepArgs),
    /// Sample the duality deflection K_F to classify a norm.
    KfProbe(KfProbeArgs),
    /// Check the distributional identity defect for a profile.
    GreenCheck(GreenCheckArgs),
    /// Emit the constant table for one (n, alpha).
    Constants(ConstantsArgs),
    /// Aggregate suite summaries from a directory into report.json.
    Report(ReportArgs),
    /// Run every [[suite]] in a TOML config file.
    Run(RunArgs),
}

/// Smoothstep selector mirrored from the core library for flag parsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum CutoffChoice {
    Quintic,
    Septic,
}

impl From<CutoffChoice> for CutoffVariant {
    fn from(choice: CutoffChoice) -> Self {
        match choice {
            CutoffChoice::Quintic => CutoffVariant::Quintic,
            CutoffChoice::Septic => CutoffVariant::Septic,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Inequality to check.
    #[arg(long)]
    which: Which,
    /// Dimension of the model space (2..=16).
    #[arg(long)]
    n: usize,
    /// Weight exponent alpha.
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Sectional curvature: 0 (flat) or negative (hyperbolic).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c: f64,
    /// Norm of the flat model: euclidean | pnorm:P | quartic:w,... | aniso:entries.
    #[arg(long, default_value = "euclidean")]
    norm: String,
    /// Radial profile: bump | polybump:c0,c1,c2,c3.
    #[arg(long, default_value = "bump")]
    profile: String,
    /// Support radius of the profile.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Relative quadrature tolerance.
    #[arg(long, default_value_t = config::DEFAULT_REL_TOL)]
    rel_tol: f64,
    /// Suite name (file stem of the artifacts).
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    /// Inequality to sweep: rellich1 or rellich2.
    #[arg(long)]
    which: Which,
    #[arg(long)]
    n: usize,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c: f64,
    #[arg(long, default_value = "euclidean")]
    norm: String,
    /// Strictly decreasing truncation radii spanning at least a decade.
    #[arg(long = "eps", value_delimiter = ',', default_values_t = config::DEFAULT_EPSILONS)]
    epsilons: Vec<f64>,
    /// Cutoff start radius r.
    #[arg(long, default_value_t = 0.1)]
    cutoff_start: f64,
    /// Cutoff end radius R (support of the trial functions).
    #[arg(long, default_value_t = 0.2)]
    cutoff_end: f64,
    /// Blend half-width as a fraction of eps.
    #[arg(long, default_value_t = 0.1)]
    eta_rel: f64,
    /// Cutoff smoothstep variant.
    #[arg(long, value_enum, default_value_t = CutoffChoice::Quintic)]
    cutoff: CutoffChoice,
    #[arg(long, default_value_t = config::DEFAULT_REL_TOL)]
    rel_tol: f64,
    /// Largest admissible |limit - sharp| / sharp.
    #[arg(long, default_value_t = config::DEFAULT_GAP_TOL)]
    gap_tol: f64,
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct KfProbeArgs {
    /// Norm to probe: euclidean | pnorm:P | quartic:w,... | aniso:entries.
    #[arg(long)]
    norm: String,
    /// Dimension of the norm.
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = config::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = config::DEFAULT_SEED)]
    seed: u64,
    /// Fail unless the probe classifies the norm this way.
    #[arg(long, value_enum)]
    expect: Option<Expectation>,
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct GreenCheckArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c: f64,
    #[arg(long, default_value = "euclidean")]
    norm: String,
    #[arg(long, default_value = "bump")]
    profile: String,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = config::DEFAULT_REL_TOL)]
    rel_tol: f64,
    /// Largest admissible relative deflection.
    #[arg(long, default_value_t = config::DEFAULT_DEFECT_TOL)]
    defect_tol: f64,
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory holding the suite summaries (default: the output directory).
    #[arg(long)]
    dir: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file with [[suite]] records.
    #[arg(long)]
    config: PathBuf,
    /// Run up to this many suites in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn resolve_out_dir(flag: Option<PathBuf>, from_config: Option<PathBuf>) -> PathBuf {
    flag.or(from_config)
        .or_else(|| std::env::var_os("RELLICH_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn suite_from_args(command: Command) -> SuiteSpec {
    match command {
        Command::Verify(a) => SuiteSpec {
            name: a.name,
            which: Some(a.which),
            n: Some(a.n),
            alpha: Some(a.alpha),
            c: Some(a.c),
            norm: Some(a.norm),
            profile: Some(a.profile),
            radius: Some(a.radius),
            rel_tol: Some(a.rel_tol),
            ..SuiteSpec::new(SuiteCommand::Verify)
        },
        Command::Sweep(a) => SuiteSpec {
            name: a.name,
            which: Some(a.which),
            n: Some(a.n),
            alpha: Some(a.alpha),
            c: Some(a.c),
            norm: Some(a.norm),
            epsilons: Some(a.epsilons),
            cutoff_start: Some(a.cutoff_start),
            cutoff_end: Some(a.cutoff_end),
            eta_rel: Some(a.eta_rel),
            cutoff: Some(a.cutoff.into()),
            rel_tol: Some(a.rel_tol),
            gap_tol: Some(a.gap_tol),
            ..SuiteSpec::new(SuiteCommand::Sweep)
        },
        Command::KfProbe(a) => SuiteSpec {
            name: a.name,
            n: Some(a.dim),
            norm: Some(a.norm),
            samples: Some(a.samples),
            seed: Some(a.seed),
            expect: a.expect,
            ..SuiteSpec::new(SuiteCommand::KfProbe)
        },
        Command::GreenCheck(a) => SuiteSpec {
            name: a.name,
            n: Some(a.n),
            alpha: Some(a.alpha),
            c: Some(a.c),
            norm: Some(a.norm),
            profile: Some(a.profile),
            radius: Some(a.radius),
            rel_tol: Some(a.rel_tol),
            defect_tol: Some(a.defect_tol),
            ..SuiteSpec::new(SuiteCommand::GreenCheck)
        },
        Command::Constants(a) => SuiteSpec {
            name: a.name,
            n: Some(a.n),
            alpha: Some(a.alpha),
            ..SuiteSpec::new(SuiteCommand::Constants)
        },
        Command::Report(_) | Command::Run(_) => unreachable!("handled by the caller"),
    }
}

/// Resolve and validate every suite, then run them in waves of `jobs`
/// threads. Failures are collected per suite, never fail-fast; the output
/// directory is only created once validation has passed.
fn execute(specs: Vec<SuiteSpec>, out_dir: &Path, jobs: usize) -> Result<Vec<SuiteOutcome>> {
    let resolved = specs
        .iter()
        .enumerate()
        .map(|(index, spec)| config::resolve(spec, index))
        .collect::<Result<Vec<_>>>()?;
    let mut seen = BTreeSet::new();
    for suite in &resolved {
        if !seen.insert(suite.name.as_str()) {
            bail!("duplicate suite name '{}'", suite.name);
        }
    }
    for suite in &resolved {
        config::validate(suite)?;
    }
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;

    let jobs = jobs.max(1);
    let mut outcomes = Vec::with_capacity(resolved.len());
    for batch in resolved.chunks(jobs) {
        let results: Vec<Result<SuiteOutcome>> = std::thread::scope(|scope| {
            let handles: Vec<_> = batch
                .iter()
                .map(|suite| scope.spawn(move || exec::run_suite(suite, out_dir)))
                .collect();
            handles
                .into_iter()
                .map(|handle| {
                    handle
                        .join()
                        .unwrap_or_else(|_| Err(anyhow!("suite thread panicked")))
                })
                .collect()
        });
        for (suite, result) in batch.iter().zip(results) {
            outcomes.push(result.unwrap_or_else(|e| {
                SuiteOutcome::aborted(&suite.name, suite.command.slug(), format!("{e:#}"))
            }));
        }
    }
    Ok(outcomes)
}

fn run(cli: Cli) -> Result<Vec<SuiteOutcome>> {
    match cli.command {
        Command::Run(args) => {
            let config = config::load_run_config(&args.config)?;
            let out_dir = resolve_out_dir(cli.out_dir, config.out_dir.clone());
            execute(config.suites, &out_dir, args.jobs)
        }
        Command::Report(args) => {
            let dir = args
                .dir
                .unwrap_or_else(|| resolve_out_dir(cli.out_dir, None));
            Ok(vec![exec::aggregate_report(&dir)?])
        }
        other => {
            let out_dir = resolve_out_dir(cli.out_dir, None);
            execute(vec![suite_from_args(other)], &out_dir, 1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcomes) => {
            for outcome in &outcomes {
                println!("{}", outcome.headline);
            }
            let failed: Vec<&SuiteOutcome> = outcomes.iter().filter(|o| !o.pass).collect();
            if failed.is_empty() {
                return ExitCode::SUCCESS;
            }
            let list = serde_json::json!({
                "failed": failed
                    .iter()
                    .map(|o| serde_json::json!({
                        "name": o.name,
                        "command": o.command,
                        "failures": o.failures,
                    }))
                    .collect::<Vec<_>>(),
            });
            println!("{list}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
