//! Suite execution: run one resolved suite, collect pass/fail evidence,
//! and write its CSV table and JSON summary atomically.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use rellich_core::duality::riemannian_probe;
use rellich_core::inequalities::{constants, green_deflection, InequalityInstance};
use rellich_core::profiles::RadialProfile;
use rellich_core::sharpness::rayleigh_sweep;

use crate::config::{self, Expectation, ResolvedSuite, SuiteCommand};
use crate::output::{csv_document, format_float, sha256_hex, write_atomic};

/// What one executed suite reports back to the driver.
#[derive(Debug)]
pub struct SuiteOutcome {
    pub name: String,
    pub command: &'static str,
    pub pass: bool,
    pub failures: Vec<String>,
    pub headline: String,
}

impl SuiteOutcome {
    /// Outcome for a suite that could not run at all (I/O error, panic).
    pub fn aborted(name: &str, command: &'static str, message: String) -> Self {
        Self {
            name: name.to_string(),
            command,
            pass: false,
            headline: format!("{name}: FAIL ({message})"),
            failures: vec![message],
        }
    }
}

#[derive(Serialize)]
struct Versions {
    rellich_core: &'static str,
    rellich_cli: &'static str,
}

/// JSON summary written next to each CSV table; field order is the
/// serialization order, so identical runs produce identical bytes.
#[derive(Serialize)]
struct Summary<'a> {
    name: &'a str,
    command: &'static str,
    pass: bool,
    failures: &'a [String],
    seed: u64,
    config_sha256: String,
    versions: Versions,
    suite: &'a ResolvedSuite,
    result: Value,
}

struct Table {
    header: &'static [&'static str],
    rows: Vec<Vec<String>>,
    result: Value,
    detail: String,
}

fn bool_cell(v: bool) -> String {
    v.to_string()
}

fn exec_verify(suite: &ResolvedSuite, failures: &mut Vec<String>) -> Table {
    const HEADER: &[&str] = &[
        "kind",
        "n",
        "alpha",
        "c",
        "gamma",
        "main_constant",
        "remainder_constant",
        "lhs",
        "rhs_main",
        "rhs_remainder",
        "margin",
        "quadrature_error",
        "converged",
        "holds",
    ];
    let kind = suite.which.expect("validated").kind();
    let evaluated = config::build_space(suite).and_then(|space| {
        let profile = suite.profile.instantiate();
        let profile: &(dyn RadialProfile<f64> + Send + Sync) = profile.as_ref();
        InequalityInstance::new(&space, &profile, kind, suite.alpha)
            .with_rel_tol(suite.rel_tol)
            .evaluate()
            .map_err(Into::into)
    });
    match evaluated {
        Ok(report) => {
            if !report.converged {
                failures.push("quadrature did not converge".into());
            }
            if !report.holds() {
                failures.push(format!(
                    "margin {} below -10 x quadrature error {}",
                    report.margin, report.quadrature_error
                ));
            }
            let rows = vec![vec![
                report.kind.label().to_string(),
                report.dim.to_string(),
                format_float(report.alpha),
                format_float(report.curvature),
                format_float(report.gamma),
                format_float(report.main_constant),
                format_float(report.remainder_constant),
                format_float(report.lhs),
                format_float(report.rhs_main),
                format_float(report.rhs_remainder),
                format_float(report.margin),
                format_float(report.quadrature_error),
                bool_cell(report.converged),
                bool_cell(report.holds()),
            ]];
            let detail = format!(
                "margin {:.3e} with quadrature error {:.3e}",
                report.margin, report.quadrature_error
            );
            Table {
                header: HEADER,
                rows,
                result: to_value(&report),
                detail,
            }
        }
        Err(e) => aborted_table(HEADER, failures, e),
    }
}

fn exec_sweep(suite: &ResolvedSuite, failures: &mut Vec<String>) -> Table {
    const HEADER: &[&str] = &[
        "epsilon",
        "numerator",
        "denominator",
        "ratio",
        "log_volume",
        "quadrature_error",
    ];
    let kind = suite.which.expect("validated").kind();
    let swept = config::build_space(suite).and_then(|space| {
        rayleigh_sweep(
            &space,
            suite.alpha,
            &config::build_sweep_config(suite),
            kind,
        )
        .map_err(Into::into)
    });
    match swept {
        Ok(sweep) => {
            let gap = sweep.relative_gap;
            if !gap.is_finite() || gap > suite.gap_tol {
                failures.push(format!(
                    "extrapolated limit {} misses the sharp constant {} (relative gap {gap:.3e} > {})",
                    sweep.extrapolated_limit(),
                    sweep.sharp_constant,
                    suite.gap_tol
                ));
            }
            let rows = sweep
                .points
                .iter()
                .map(|p| {
                    vec![
                        format_float(p.epsilon),
                        format_float(p.numerator),
                        format_float(p.denominator),
                        format_float(p.ratio),
                        format_float(p.log_volume),
                        format_float(p.quadrature_error),
                    ]
                })
                .collect();
            let detail = format!(
                "limit {:.10e} vs sharp {:.10e} (relative gap {gap:.3e})",
                sweep.extrapolated_limit(),
                sweep.sharp_constant
            );
            Table {
                header: HEADER,
                rows,
                result: to_value(&sweep),
                detail,
            }
        }
        Err(e) => aborted_table(HEADER, failures, e),
    }
}

fn exec_kf_probe(suite: &ResolvedSuite, failures: &mut Vec<String>) -> Table {
    const HEADER: &[&str] = &[
        "norm_kind",
        "dim",
        "samples",
        "seed",
        "max_abs_kf",
        "scale",
        "verdict",
    ];
    let probed = suite
        .norm
        .instantiate::<f64>()
        .and_then(|norm| riemannian_probe(&norm, suite.samples, suite.seed));
    match probed {
        Ok(report) => {
            let classified = if report.verdict {
                Expectation::Riemannian
            } else {
                Expectation::Finslerian
            };
            if let Some(expected) = suite.expect {
                if expected != classified {
                    failures.push(format!(
                        "expected {expected:?}, probe classified the norm as {classified:?} (max |K_F| = {}, scale {})",
                        report.max_abs_kf, report.scale
                    ));
                }
            }
            let rows = vec![vec![
                config::norm_kind_token(&suite.norm).to_string(),
                suite.n.to_string(),
                report.samples.to_string(),
                report.seed.to_string(),
                format_float(report.max_abs_kf),
                format_float(report.scale),
                bool_cell(report.verdict),
            ]];
            let detail = format!(
                "classified {classified:?} (max |K_F| = {:.3e} at scale {:.3e})",
                report.max_abs_kf, report.scale
            );
            Table {
                header: HEADER,
                rows,
                result: to_value(&report),
                detail,
            }
        }
        Err(e) => aborted_table(HEADER, failures, e.into()),
    }
}

fn exec_green_check(suite: &ResolvedSuite, failures: &mut Vec<String>) -> Table {
    const HEADER: &[&str] = &[
        "n",
        "alpha",
        "c",
        "term_weight",
        "term_function",
        "deflection",
        "relative_deflection",
        "quadrature_error",
        "defect_tol",
    ];
    let checked = config::build_space(suite).and_then(|space| {
        let profile = suite.profile.instantiate();
        let profile: &(dyn RadialProfile<f64> + Send + Sync) = profile.as_ref();
        green_deflection(&space, &profile, suite.alpha, suite.rel_tol).map_err(Into::into)
    });
    match checked {
        Ok(report) => {
            if report.relative_deflection > suite.defect_tol {
                failures.push(format!(
                    "relative deflection {:.3e} exceeds {:.1e}",
                    report.relative_deflection, suite.defect_tol
                ));
            }
            let rows = vec![vec![
                suite.n.to_string(),
                format_float(suite.alpha),
                format_float(suite.curvature),
                format_float(report.term_weight),
                format_float(report.term_function),
                format_float(report.value),
                format_float(report.relative_deflection),
                format_float(report.quadrature_error),
                format_float(suite.defect_tol),
            ]];
            let detail = format!(
                "relative deflection {:.3e} (tolerance {:.1e})",
                report.relative_deflection, suite.defect_tol
            );
            Table {
                header: HEADER,
                rows,
                result: to_value(&report),
                detail,
            }
        }
        Err(e) => aborted_table(HEADER, failures, e),
    }
}

fn exec_constants(suite: &ResolvedSuite) -> Table {
    const HEADER: &[&str] = &[
        "n",
        "alpha",
        "gamma",
        "hardy_main",
        "hardy_remainder",
        "hardy_valid",
        "rellich_main",
        "rellich_remainder",
        "rellich_valid",
        "hardy_rellich_main",
        "hardy_rellich_remainder",
        "hardy_rellich_valid",
    ];
    let table = constants::<f64>(suite.n, suite.alpha);
    let rows = vec![vec![
        table.dim.to_string(),
        format_float(table.alpha),
        format_float(table.gamma),
        format_float(table.hardy_main),
        format_float(table.hardy_remainder),
        bool_cell(table.hardy_valid),
        format_float(table.rellich_main),
        format_float(table.rellich_remainder),
        bool_cell(table.rellich_valid),
        format_float(table.hardy_rellich_main),
        format_float(table.hardy_rellich_remainder),
        bool_cell(table.hardy_rellich_valid),
    ]];
    let detail = format!(
        "gamma {:.6}, main constants {:.6} / {:.6} / {:.6}",
        table.gamma, table.hardy_main, table.rellich_main, table.hardy_rellich_main
    );
    Table {
        header: HEADER,
        rows,
        result: to_value(&table),
        detail,
    }
}

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).unwrap_or(Value::Null)
}

fn aborted_table(
    header: &'static [&'static str],
    failures: &mut Vec<String>,
    e: anyhow::Error,
) -> Table {
    failures.push(format!("evaluation failed: {e:#}"));
    Table {
        header,
        rows: Vec::new(),
        result: Value::Null,
        detail: "evaluation failed".into(),
    }
}

/// Run one suite and write `<name>.csv` and `<name>.json` into `out_dir`.
pub fn run_suite(suite: &ResolvedSuite, out_dir: &Path) -> Result<SuiteOutcome> {
    let mut failures = Vec::new();
    let table = match suite.command {
        SuiteCommand::Verify => exec_verify(suite, &mut failures),
        SuiteCommand::Sweep => exec_sweep(suite, &mut failures),
        SuiteCommand::KfProbe => exec_kf_probe(suite, &mut failures),
        SuiteCommand::GreenCheck => exec_green_check(suite, &mut failures),
        SuiteCommand::Constants => exec_constants(suite),
    };
    let pass = failures.is_empty();

    let canonical = serde_json::to_vec(suite).context("serializing suite for hashing")?;
    let summary = Summary {
        name: &suite.name,
        command: suite.command.slug(),
        pass,
        failures: &failures,
        seed: suite.seed,
        config_sha256: sha256_hex(&canonical),
        versions: Versions {
            rellich_core: rellich_core::VERSION,
            rellich_cli: env!("CARGO_PKG_VERSION"),
        },
        suite,
        result: table.result,
    };
    let mut json = serde_json::to_vec_pretty(&summary).context("serializing summary")?;
    json.push(b'\n');

    let csv = csv_document(table.header, &table.rows);
    write_atomic(&out_dir.join(format!("{}.csv", suite.name)), csv.as_bytes())?;
    write_atomic(&out_dir.join(format!("{}.json", suite.name)), &json)?;

    let status = if pass { "PASS" } else { "FAIL" };
    let headline = format!(
        "{} ({}): {status} — {}",
        suite.name,
        suite.command.slug(),
        table.detail
    );
    Ok(SuiteOutcome {
        name: suite.name.clone(),
        command: suite.command.slug(),
        pass,
        failures,
        headline,
    })
}

/// Aggregate every suite summary in `dir` into `report.json`; fails the
/// pseudo-suite when any summary failed or none were found.
pub fn aggregate_report(dir: &Path) -> Result<SuiteOutcome> {
    #[derive(Deserialize)]
    struct Head {
        name: String,
        pass: bool,
        #[serde(default)]
        failures: Vec<String>,
    }

    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|ext| ext == "json")
                && p.file_name().is_some_and(|f| f != "report.json")
        })
        .collect();
    paths.sort();

    let mut heads = Vec::new();
    for path in &paths {
        let Ok(bytes) = fs::read(path) else { continue };
        if let Ok(head) = serde_json::from_slice::<Head>(&bytes) {
            heads.push(head);
        }
    }

    let failed: Vec<&Head> = heads.iter().filter(|h| !h.pass).collect();
    let report = serde_json::json!({
        "total": heads.len(),
        "passed": heads.len() - failed.len(),
        "failed": failed.len(),
        "failures": failed
            .iter()
            .map(|h| serde_json::json!({"name": h.name, "failures": h.failures}))
            .collect::<Vec<_>>(),
    });
    let mut bytes = serde_json::to_vec_pretty(&report).context("serializing report")?;
    bytes.push(b'\n');
    write_atomic(&dir.join("report.json"), &bytes)?;

    let mut failures: Vec<String> = failed
        .iter()
        .map(|h| format!("suite '{}' failed", h.name))
        .collect();
    if heads.is_empty() {
        failures.push(format!("no suite summaries found in {}", dir.display()));
    }
    let pass = failures.is_empty();
    let headline = format!(
        "report: {} of {} suites passed{}",
        heads.len() - failed.len(),
        heads.len(),
        if pass { "" } else { " — FAIL" }
    );
    Ok(SuiteOutcome {
        name: "report".into(),
        command: "report",
        pass,
        failures,
        headline,
    })
}
