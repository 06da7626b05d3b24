//! Suite configuration: the record types shared by the TOML config file
//! and the command-line flags, default resolution, and the pre-flight
//! validation that must reject a bad suite before any quadrature runs.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use rellich_core::inequalities::{constants, InequalityKind};
use rellich_core::models::ModelSpace;
use rellich_core::norms::NormDescriptor;
use rellich_core::profiles::{Bump, PolyBump, RadialProfile};
use rellich_core::sharpness::{CutoffVariant, SweepConfig};

pub const DEFAULT_EPSILONS: [f64; 5] = [0.05, 0.02, 0.01, 0.005, 0.002];
pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_GAP_TOL: f64 = 0.02;
pub const DEFAULT_DEFECT_TOL: f64 = 1e-6;
pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_SEED: u64 = 42;

/// What a suite record asks the driver to do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteCommand {
    Verify,
    Sweep,
    KfProbe,
    GreenCheck,
    Constants,
}

impl SuiteCommand {
    pub fn slug(self) -> &'static str {
        match self {
            SuiteCommand::Verify => "verify",
            SuiteCommand::Sweep => "sweep",
            SuiteCommand::KfProbe => "kf-probe",
            SuiteCommand::GreenCheck => "green-check",
            SuiteCommand::Constants => "constants",
        }
    }
}

/// Inequality selector exposed on the command line and in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    /// First-order inequality (gradient energy vs. weighted mass).
    Hardy,
    /// Second-order inequality (Laplacian energy vs. weighted mass).
    Rellich1,
    /// Second-order inequality against the gradient term.
    Rellich2,
}

impl Which {
    pub fn kind(self) -> InequalityKind {
        match self {
            Which::Hardy => InequalityKind::Hardy,
            Which::Rellich1 => InequalityKind::Rellich,
            Which::Rellich2 => InequalityKind::HardyRellich,
        }
    }
}

/// Expected probe classification, when the caller wants kf-probe to be a
/// pass/fail check instead of a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    Riemannian,
    Finslerian,
}

/// One `[[suite]]` record as written by the user; every field except
/// `command` is optional and falls back to a documented default.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    pub command: SuiteCommand,
    pub name: Option<String>,
    pub which: Option<Which>,
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub c: Option<f64>,
    pub norm: Option<String>,
    pub profile: Option<String>,
    pub radius: Option<f64>,
    pub rel_tol: Option<f64>,
    pub epsilons: Option<Vec<f64>>,
    pub cutoff_start: Option<f64>,
    pub cutoff_end: Option<f64>,
    pub eta_rel: Option<f64>,
    pub cutoff: Option<CutoffVariant>,
    pub gap_tol: Option<f64>,
    pub defect_tol: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub expect: Option<Expectation>,
}

impl SuiteSpec {
    /// A bare record for the given command, ready for flag overrides.
    pub fn new(command: SuiteCommand) -> Self {
        Self {
            command,
            name: None,
            which: None,
            n: None,
            alpha: None,
            c: None,
            norm: None,
            profile: None,
            radius: None,
            rel_tol: None,
            epsilons: None,
            cutoff_start: None,
            cutoff_end: None,
            eta_rel: None,
            cutoff: None,
            gap_tol: None,
            defect_tol: None,
            samples: None,
            seed: None,
            expect: None,
        }
    }
}

/// Top-level config file: optional output directory plus suite records.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub out_dir: Option<PathBuf>,
    #[serde(rename = "suite", default)]
    pub suites: Vec<SuiteSpec>,
}

/// Load and parse a TOML config; parse errors carry line/column positions.
pub fn load_run_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config: RunConfig =
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if config.suites.is_empty() {
        bail!("{}: config contains no [[suite]] records", path.display());
    }
    Ok(config)
}

/// Compactly supported radial profile choice, serializable for provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    Bump { radius: f64 },
    PolyBump { radius: f64, coeffs: [f64; 4] },
}

impl ProfileSpec {
    pub fn instantiate(&self) -> Box<dyn RadialProfile<f64> + Send + Sync> {
        match *self {
            ProfileSpec::Bump { radius } => Box::new(Bump { radius }),
            ProfileSpec::PolyBump { radius, coeffs } => Box::new(PolyBump { radius, coeffs }),
        }
    }
}

/// A suite with every default filled in; its canonical JSON serialization
/// is hashed into the report for provenance.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedSuite {
    pub name: String,
    pub command: SuiteCommand,
    pub which: Option<Which>,
    pub n: usize,
    pub alpha: f64,
    pub curvature: f64,
    pub norm: NormDescriptor,
    pub profile: ProfileSpec,
    pub rel_tol: f64,
    pub epsilons: Vec<f64>,
    pub cutoff_start: f64,
    pub cutoff_end: f64,
    pub eta_rel: f64,
    pub cutoff: CutoffVariant,
    pub gap_tol: f64,
    pub defect_tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub expect: Option<Expectation>,
}

fn parse_floats(name: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<f64>()
                .with_context(|| format!("{name}: cannot parse '{piece}' as a number"))
        })
        .collect()
}

/// Parse the norm syntax `euclidean | pnorm:P | quartic:w1,w2,... |
/// aniso:a11,a12,...` (matrix entries row-major) at dimension `dim`,
/// and build it once to validate the parameters.
pub fn parse_norm(spec: &str, dim: usize) -> Result<NormDescriptor> {
    let (head, tail) = match spec.split_once(':') {
        Some((head, tail)) => (head, Some(tail)),
        None => (spec, None),
    };
    let descriptor = match (head, tail) {
        ("euclidean", None) => NormDescriptor::Euclidean { dim },
        ("pnorm", Some(tail)) => {
            let p = tail
                .trim()
                .parse::<f64>()
                .with_context(|| format!("pnorm: cannot parse exponent '{tail}'"))?;
            NormDescriptor::PNorm { dim, p }
        }
        ("quartic", Some(tail)) => {
            let weights = parse_floats("quartic", tail)?;
            if weights.len() != dim {
                bail!(
                    "quartic: got {} weights, need one per dimension ({dim})",
                    weights.len()
                );
            }
            NormDescriptor::Quartic { weights }
        }
        ("aniso", Some(tail)) => {
            let matrix = parse_floats("aniso", tail)?;
            if matrix.len() != dim * dim {
                bail!(
                    "aniso: got {} entries, need a full row-major {dim}x{dim} matrix ({})",
                    matrix.len(),
                    dim * dim
                );
            }
            NormDescriptor::Anisotropic { dim, matrix }
        }
        _ => bail!(
            "unknown norm '{spec}' (expected euclidean, pnorm:P, quartic:w1,..., or aniso:a11,...)"
        ),
    };
    descriptor
        .instantiate::<f64>()
        .with_context(|| format!("norm '{spec}' is not admissible"))?;
    Ok(descriptor)
}

/// Token naming the norm family, used as a CSV cell.
pub fn norm_kind_token(descriptor: &NormDescriptor) -> &'static str {
    match descriptor {
        NormDescriptor::Euclidean { .. } => "euclidean",
        NormDescriptor::Anisotropic { .. } => "aniso",
        NormDescriptor::PNorm { .. } => "pnorm",
        NormDescriptor::Quartic { .. } => "quartic",
    }
}

/// Parse the profile syntax `bump | polybump:c0,c1,c2,c3` with the given
/// support radius.
pub fn parse_profile(spec: &str, radius: f64) -> Result<ProfileSpec> {
    let (head, tail) = match spec.split_once(':') {
        Some((head, tail)) => (head, Some(tail)),
        None => (spec, None),
    };
    match (head, tail) {
        ("bump", None) => Ok(ProfileSpec::Bump { radius }),
        ("polybump", Some(tail)) => {
            let coeffs = parse_floats("polybump", tail)?;
            if coeffs.len() != 4 {
                bail!(
                    "polybump: got {} coefficients, need exactly 4",
                    coeffs.len()
                );
            }
            Ok(ProfileSpec::PolyBump {
                radius,
                coeffs: [coeffs[0], coeffs[1], coeffs[2], coeffs[3]],
            })
        }
        _ => bail!("unknown profile '{spec}' (expected bump or polybump:c0,c1,c2,c3)"),
    }
}

/// Fill in every default and parse the textual fields. Fails with the
/// suite name in the message when a required field is missing.
pub fn resolve(spec: &SuiteSpec, index: usize) -> Result<ResolvedSuite> {
    let name = spec
        .name
        .clone()
        .unwrap_or_else(|| format!("{}-{:02}", spec.command.slug(), index + 1));
    if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
        bail!("suite name '{name}' must be a plain file stem");
    }
    let n = spec
        .n
        .with_context(|| format!("suite '{name}': n is required"))?;
    let alpha = match spec.alpha {
        Some(alpha) => alpha,
        None if spec.command == SuiteCommand::KfProbe => 0.0,
        None => bail!("suite '{name}': alpha is required"),
    };
    let curvature = spec.c.unwrap_or(0.0);
    let radius = spec.radius.unwrap_or(1.0);
    if !(radius > 0.0) || !radius.is_finite() {
        bail!("suite '{name}': radius must be positive and finite, got {radius}");
    }
    let norm = parse_norm(spec.norm.as_deref().unwrap_or("euclidean"), n)
        .with_context(|| format!("suite '{name}'"))?;
    let profile = parse_profile(spec.profile.as_deref().unwrap_or("bump"), radius)
        .with_context(|| format!("suite '{name}'"))?;
    Ok(ResolvedSuite {
        name,
        command: spec.command,
        which: spec.which,
        n,
        alpha,
        curvature,
        norm,
        profile,
        rel_tol: spec.rel_tol.unwrap_or(DEFAULT_REL_TOL),
        epsilons: spec
            .epsilons
            .clone()
            .unwrap_or_else(|| DEFAULT_EPSILONS.to_vec()),
        cutoff_start: spec.cutoff_start.unwrap_or(0.1),
        cutoff_end: spec.cutoff_end.unwrap_or(0.2),
        eta_rel: spec.eta_rel.unwrap_or(0.1),
        cutoff: spec.cutoff.unwrap_or(CutoffVariant::Quintic),
        gap_tol: spec.gap_tol.unwrap_or(DEFAULT_GAP_TOL),
        defect_tol: spec.defect_tol.unwrap_or(DEFAULT_DEFECT_TOL),
        samples: spec.samples.unwrap_or(DEFAULT_SAMPLES),
        seed: spec.seed.unwrap_or(DEFAULT_SEED),
        expect: spec.expect,
    })
}

fn hypothesis_text(kind: InequalityKind) -> &'static str {
    match kind {
        InequalityKind::Hardy => "n - 2 + alpha > 0",
        InequalityKind::Rellich => "n - 4 + alpha > 0 and alpha < 2",
        InequalityKind::HardyRellich => "n - 8 + 3 alpha > 0 and alpha < 2",
    }
}

fn require_valid_kind(suite: &ResolvedSuite, kind: InequalityKind) -> Result<()> {
    if !constants::<f64>(suite.n, suite.alpha).is_valid(kind) {
        bail!(
            "suite '{}': {} hypotheses fail at n = {}, alpha = {} (need {})",
            suite.name,
            kind.label(),
            suite.n,
            suite.alpha,
            hypothesis_text(kind)
        );
    }
    Ok(())
}

/// Build the model space a suite runs on: the flat model carries the
/// configured norm, the hyperbolic model is Riemannian by construction.
pub fn build_space(suite: &ResolvedSuite) -> Result<ModelSpace<f64>> {
    if suite.curvature == 0.0 {
        Ok(ModelSpace::flat_minkowski(suite.norm.instantiate()?)?)
    } else {
        Ok(ModelSpace::hyperbolic(suite.n, suite.curvature)?)
    }
}

pub fn build_sweep_config(suite: &ResolvedSuite) -> SweepConfig<f64> {
    SweepConfig {
        cutoff_start: suite.cutoff_start,
        cutoff_end: suite.cutoff_end,
        eta_rel: suite.eta_rel,
        epsilons: suite.epsilons.clone(),
        rel_tol: suite.rel_tol,
        cutoff: suite.cutoff,
    }
}

/// Semantic validation, run for every suite before any computation or
/// directory creation.
pub fn validate(suite: &ResolvedSuite) -> Result<()> {
    let name = &suite.name;
    if suite.n < 2 {
        bail!("suite '{name}': n must be at least 2, got {}", suite.n);
    }
    if !suite.alpha.is_finite() {
        bail!("suite '{name}': alpha must be finite");
    }
    if !suite.curvature.is_finite() || suite.curvature > 0.0 {
        bail!(
            "suite '{name}': c must be zero (flat) or negative (hyperbolic), got {}",
            suite.curvature
        );
    }
    if suite.curvature < 0.0 && !matches!(suite.norm, NormDescriptor::Euclidean { .. }) {
        bail!(
            "suite '{name}': the hyperbolic model is Riemannian; a norm choice only applies to c = 0"
        );
    }
    if !(suite.rel_tol > 0.0) || !suite.rel_tol.is_finite() {
        bail!(
            "suite '{name}': rel_tol must be positive and finite, got {}",
            suite.rel_tol
        );
    }
    match suite.command {
        SuiteCommand::Verify => {
            let which = suite
                .which
                .with_context(|| format!("suite '{name}': verify needs which"))?;
            require_valid_kind(suite, which.kind())?;
        }
        SuiteCommand::Sweep => {
            let which = suite
                .which
                .with_context(|| format!("suite '{name}': sweep needs which"))?;
            if which == Which::Hardy {
                bail!("suite '{name}': sweeps cover the second-order inequalities only (rellich1, rellich2)");
            }
            require_valid_kind(suite, which.kind())?;
            build_sweep_config(suite)
                .validate()
                .with_context(|| format!("suite '{name}'"))?;
            if suite.epsilons.len() < 4 {
                bail!(
                    "suite '{name}': extrapolation needs at least 4 epsilons, got {}",
                    suite.epsilons.len()
                );
            }
            let max = suite
                .epsilons
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            let min = suite.epsilons.iter().cloned().fold(f64::INFINITY, f64::min);
            if !(max / min >= 10.0) {
                bail!("suite '{name}': epsilons must span at least a decade, got {max} .. {min}");
            }
            if !(suite.gap_tol > 0.0 && suite.gap_tol <= 1.0) {
                bail!(
                    "suite '{name}': gap_tol must lie in (0, 1], got {}",
                    suite.gap_tol
                );
            }
        }
        SuiteCommand::KfProbe => {
            if suite.samples == 0 {
                bail!("suite '{name}': samples must be at least 1");
            }
        }
        SuiteCommand::GreenCheck => {
            if !(suite.n as f64 - 4.0 + suite.alpha > 0.0) {
                bail!(
                    "suite '{name}': the distributional identity needs n - 4 + alpha > 0, got n = {}, alpha = {}",
                    suite.n,
                    suite.alpha
                );
            }
            if !(suite.defect_tol > 0.0) {
                bail!(
                    "suite '{name}': defect_tol must be positive, got {}",
                    suite.defect_tol
                );
            }
        }
        SuiteCommand::Constants => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(command: SuiteCommand) -> SuiteSpec {
        let mut spec = SuiteSpec::new(command);
        spec.n = Some(5);
        spec.alpha = Some(0.0);
        spec
    }

    #[test]
    fn norm_syntax_parses_the_full_catalog() {
        assert!(matches!(
            parse_norm("euclidean", 3).unwrap(),
            NormDescriptor::Euclidean { dim: 3 }
        ));
        assert!(matches!(
            parse_norm("pnorm:4", 2).unwrap(),
            NormDescriptor::PNorm { dim: 2, .. }
        ));
        assert!(matches!(
            parse_norm("quartic:1,0.5,2", 3).unwrap(),
            NormDescriptor::Quartic { .. }
        ));
        assert!(matches!(
            parse_norm("aniso:2,0.5,0.5,1", 2).unwrap(),
            NormDescriptor::Anisotropic { .. }
        ));
    }

    #[test]
    fn norm_syntax_rejects_bad_input() {
        assert!(parse_norm("simplex", 2).is_err());
        assert!(parse_norm("pnorm:1.5", 2).is_err());
        assert!(parse_norm("quartic:1,2", 3).is_err());
        assert!(parse_norm("aniso:1,2,3", 2).is_err());
        // Symmetric but indefinite matrix must be rejected at build time.
        assert!(parse_norm("aniso:1,2,2,1", 2).is_err());
    }

    #[test]
    fn profile_syntax_parses_and_rejects() {
        assert_eq!(
            parse_profile("bump", 2.0).unwrap(),
            ProfileSpec::Bump { radius: 2.0 }
        );
        assert_eq!(
            parse_profile("polybump:1,0,-0.5,0.25", 1.0).unwrap(),
            ProfileSpec::PolyBump {
                radius: 1.0,
                coeffs: [1.0, 0.0, -0.5, 0.25]
            }
        );
        assert!(parse_profile("polybump:1,2", 1.0).is_err());
        assert!(parse_profile("plateau", 1.0).is_err());
    }

    #[test]
    fn resolution_fills_documented_defaults() {
        let mut spec = base(SuiteCommand::Sweep);
        spec.which = Some(Which::Rellich1);
        let resolved = resolve(&spec, 3).unwrap();
        assert_eq!(resolved.name, "sweep-04");
        assert_eq!(resolved.epsilons, DEFAULT_EPSILONS.to_vec());
        assert_eq!(resolved.cutoff_start, 0.1);
        assert_eq!(resolved.cutoff_end, 0.2);
        assert_eq!(resolved.gap_tol, DEFAULT_GAP_TOL);
        assert!(validate(&resolved).is_ok());
    }

    #[test]
    fn validation_rejects_alpha_two_before_running() {
        let mut spec = base(SuiteCommand::Verify);
        spec.which = Some(Which::Rellich1);
        spec.alpha = Some(2.0);
        let resolved = resolve(&spec, 0).unwrap();
        let err = validate(&resolved).unwrap_err().to_string();
        assert!(err.contains("alpha"), "unexpected message: {err}");
    }

    #[test]
    fn validation_rejects_hardy_sweeps_and_short_epsilon_lists() {
        let mut spec = base(SuiteCommand::Sweep);
        spec.which = Some(Which::Hardy);
        assert!(validate(&resolve(&spec, 0).unwrap()).is_err());

        spec.which = Some(Which::Rellich1);
        spec.epsilons = Some(vec![0.05, 0.04, 0.03, 0.02]);
        let err = validate(&resolve(&spec, 0).unwrap())
            .unwrap_err()
            .to_string();
        assert!(err.contains("decade"), "unexpected message: {err}");
    }

    #[test]
    fn validation_ties_norm_choice_to_the_flat_model() {
        let mut spec = base(SuiteCommand::Verify);
        spec.which = Some(Which::Rellich1);
        spec.c = Some(-1.0);
        spec.norm = Some("pnorm:4".into());
        let err = validate(&resolve(&spec, 0).unwrap())
            .unwrap_err()
            .to_string();
        assert!(err.contains("Riemannian"), "unexpected message: {err}");
    }

    #[test]
    fn toml_round_trip_and_position_annotated_errors() {
        let config: RunConfig = toml::from_str(
            r#"
            out_dir = "results"

            [[suite]]
            name = "margin"
            command = "verify"
            which = "rellich1"
            n = 5
            alpha = 0.0

            [[suite]]
            command = "kf-probe"
            n = 2
            norm = "pnorm:4"
            expect = "finslerian"
            "#,
        )
        .unwrap();
        assert_eq!(config.suites.len(), 2);
        assert_eq!(config.suites[0].which, Some(Which::Rellich1));
        assert_eq!(config.suites[1].expect, Some(Expectation::Finslerian));

        let err = toml::from_str::<RunConfig>("[[suite]]\ncommand = \"verify\"\nepsilon = 3\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("epsilon"), "unexpected message: {err}");
        assert!(err.contains("line"), "error should carry a position: {err}");
    }
}
