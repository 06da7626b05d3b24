//! Weighted Hardy and Rellich inequalities with curvature remainder terms,
//! evaluated as radial integrals on a model space.
//!
//! For u = f(rho) with rho the distance from the pole, weight exponent
//! alpha, dimension n, and gamma = (n - 4 + alpha)/2, the toolkit checks:
//!
//! * Hardy: int rho^alpha F*(Du)^2 >= C_h int rho^{alpha-2} u^2
//!   + R_h int rho^{alpha-2} W u^2,
//! * Rellich: int rho^alpha (Lap u)^2 >= C_r int rho^{alpha-4} u^2
//!   + R_r int rho^{alpha-4} W u^2,
//! * Hardy-Rellich: int rho^alpha (Lap u)^2 >= C_hr int rho^{alpha-2}
//!   F*(Du)^2 + R_hr int rho^{alpha-4} W u^2,
//!
//! where W(rho) = rho ct(c, rho) - 1 >= 0 is the curvature remainder weight
//! (zero in the flat case). The constants and their validity hypotheses are
//! produced by [`constants`]; the two algebraic identities chaining the
//! Rellich constants through the Hardy-Rellich ones are exposed for direct
//! testing. `green_deflection` measures the defect in the integration by
//! parts identity underpinning the proofs and should vanish on model
//! spaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ModelSpace;
use crate::profiles::{RadialProfile, Squared};
use crate::quadrature::{integrate_radial, QuadratureSpec};
use crate::scalar::{real, real_from_usize, Real};

/// Inner integration endpoint used when the caller does not supply one;
/// keeps the weights finite while staying far below any feature scale.
pub const DOMAIN_FLOOR: f64 = 1e-10;

/// How many accumulated quadrature error estimates a margin may dip below
/// zero before a check counts as failed.
pub const MARGIN_ERROR_MULTIPLE: f64 = 10.0;

/// The three inequality families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityKind {
    /// First-order: gradient versus rho^{-2} u^2.
    Hardy,
    /// Second-order: Laplacian versus rho^{-4} u^2.
    Rellich,
    /// Mixed second-order: Laplacian versus rho^{-2} gradient.
    HardyRellich,
}

impl InequalityKind {
    pub fn label(&self) -> &'static str {
        match self {
            InequalityKind::Hardy => "hardy",
            InequalityKind::Rellich => "rellich",
            InequalityKind::HardyRellich => "hardy_rellich",
        }
    }
}

/// Sharp constants for the three inequalities at a given (n, alpha),
/// with the hypothesis flags under which each one is proved.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Constants<T> {
    pub dim: usize,
    pub alpha: T,
    /// gamma = (n - 4 + alpha) / 2, the extremal power exponent.
    pub gamma: T,
    /// (n - 2 + alpha)^2 / 4.
    pub hardy_main: T,
    /// (n - 2 + alpha)(n - 1) / 2.
    pub hardy_remainder: T,
    /// Requires n - 2 + alpha > 0.
    pub hardy_valid: bool,
    /// (n - 4 + alpha)^2 (n - alpha)^2 / 16.
    pub rellich_main: T,
    /// (n - 4 + alpha)(n - alpha)(n - 2)(n - 1) / 4.
    pub rellich_remainder: T,
    /// Requires n - 4 + alpha > 0 and alpha < 2.
    pub rellich_valid: bool,
    /// (n - alpha)^2 / 4.
    pub hardy_rellich_main: T,
    /// (n - 4 + alpha)^2 (n - alpha)(n - 1) / 8.
    pub hardy_rellich_remainder: T,
    /// Requires n - 8 + 3 alpha > 0 and alpha < 2.
    pub hardy_rellich_valid: bool,
}

impl<T: Real> Constants<T> {
    pub fn main_constant(&self, kind: InequalityKind) -> T {
        match kind {
            InequalityKind::Hardy => self.hardy_main,
            InequalityKind::Rellich => self.rellich_main,
            InequalityKind::HardyRellich => self.hardy_rellich_main,
        }
    }

    pub fn remainder_constant(&self, kind: InequalityKind) -> T {
        match kind {
            InequalityKind::Hardy => self.hardy_remainder,
            InequalityKind::Rellich => self.rellich_remainder,
            InequalityKind::HardyRellich => self.hardy_rellich_remainder,
        }
    }

    pub fn is_valid(&self, kind: InequalityKind) -> bool {
        match kind {
            InequalityKind::Hardy => self.hardy_valid,
            InequalityKind::Rellich => self.rellich_valid,
            InequalityKind::HardyRellich => self.hardy_rellich_valid,
        }
    }
}

/// Sharp constants and hypothesis flags at dimension n and weight exponent
/// alpha.
pub fn constants<T: Real>(dim: usize, alpha: T) -> Constants<T> {
    let n = real_from_usize::<T>(dim);
    let one = T::one();
    let two = real::<T>(2.0);
    let four = real::<T>(4.0);
    let eight = real::<T>(8.0);
    let sixteen = real::<T>(16.0);

    let h = n - two + alpha;
    let r = n - four + alpha;
    let s = n - alpha;
    let gamma = r / two;

    Constants {
        dim,
        alpha,
        gamma,
        hardy_main: h * h / four,
        hardy_remainder: h * (n - one) / two,
        hardy_valid: h > T::zero(),
        rellich_main: r * r * s * s / sixteen,
        rellich_remainder: r * s * (n - two) * (n - one) / four,
        rellich_valid: r > T::zero() && alpha < two,
        hardy_rellich_main: s * s / four,
        hardy_rellich_remainder: r * r * s * (n - one) / eight,
        hardy_rellich_valid: n - eight + real::<T>(3.0) * alpha > T::zero() && alpha < two,
    }
}

/// Residual of the two identities chaining the Rellich constants through
/// the Hardy-Rellich ones, with the power exponent supplied explicitly so
/// a perturbed exponent visibly breaks them:
///
/// * rellich_main     = hardy_rellich_main * g^2,
/// * rellich_remainder = hardy_rellich_remainder(g) + hardy_rellich_main
///   * g * (n - 1), where hardy_rellich_remainder(g) = g^2 (n - alpha)
///   (n - 1) / 2.
///
/// Returns the larger relative residual, scales normalized by
/// max(1, |lhs|, |rhs|).
pub fn chain_identity_residual<T: Real>(dim: usize, alpha: T, gamma: T) -> T {
    let c = constants(dim, alpha);
    let n = real_from_usize::<T>(dim);
    let one = T::one();
    let two = real::<T>(2.0);

    let relative = |lhs: T, rhs: T| -> T {
        let scale = one.max(lhs.abs()).max(rhs.abs());
        (lhs - rhs).abs() / scale
    };

    // Main constants: the Rellich constant factors through the mixed one.
    let main_rhs = c.hardy_rellich_main * gamma * gamma;
    let r_main = relative(c.rellich_main, main_rhs);

    // Remainder constants: the mixed remainder plus the cross term from
    // applying the weighted Hardy step with exponent gamma.
    let hr_remainder_of_gamma = gamma * gamma * (n - alpha) * (n - one) / two;
    let rem_rhs = hr_remainder_of_gamma + c.hardy_rellich_main * gamma * (n - one);
    let r_rem = relative(c.rellich_remainder, rem_rhs);

    r_main.max(r_rem)
}

/// True when the chaining identities hold to 1e-12 relative with the
/// canonical exponent gamma = (n - 4 + alpha)/2.
pub fn chain_identity_check<T: Real>(dim: usize, alpha: T) -> bool {
    let gamma = constants(dim, alpha).gamma;
    chain_identity_residual(dim, alpha, gamma) <= real::<T>(1e-12)
}

/// Evaluation of one inequality for one radial profile on one model space.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InequalityReport<T> {
    pub kind: InequalityKind,
    pub dim: usize,
    pub alpha: T,
    pub curvature: T,
    pub gamma: T,
    pub main_constant: T,
    pub remainder_constant: T,
    /// Left-hand side integral (gradient or Laplacian energy).
    pub lhs: T,
    /// Main weighted integral on the right-hand side.
    pub rhs_main: T,
    /// Curvature remainder integral (zero in the flat case).
    pub rhs_remainder: T,
    /// lhs - main_constant * rhs_main - remainder_constant * rhs_remainder.
    pub margin: T,
    /// Constant-weighted sum of the three quadrature error estimates.
    pub quadrature_error: T,
    /// All three integrals met their tolerance.
    pub converged: bool,
}

impl<T: Real> InequalityReport<T> {
    /// The inequality holds up to quadrature error: the margin may be
    /// negative only within `MARGIN_ERROR_MULTIPLE` error estimates.
    pub fn holds(&self) -> bool {
        self.margin >= -real::<T>(MARGIN_ERROR_MULTIPLE) * self.quadrature_error
    }
}

/// One inequality check, ready to evaluate: model space, radial profile,
/// weight exponent, and integration controls.
#[derive(Debug, Clone)]
pub struct InequalityInstance<'a, T, P> {
    space: &'a ModelSpace<T>,
    profile: &'a P,
    kind: InequalityKind,
    alpha: T,
    interval: Option<(T, T)>,
    rel_tol: T,
}

impl<'a, T: Real, P: RadialProfile<T>> InequalityInstance<'a, T, P> {
    pub fn new(space: &'a ModelSpace<T>, profile: &'a P, kind: InequalityKind, alpha: T) -> Self {
        Self {
            space,
            profile,
            kind,
            alpha,
            interval: None,
            rel_tol: real(1e-9),
        }
    }

    /// Integrate over [a, b] instead of the default
    /// [DOMAIN_FLOOR, support radius].
    pub fn with_interval(mut self, a: T, b: T) -> Self {
        self.interval = Some((a, b));
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    fn domain(&self) -> Result<(T, T)> {
        if let Some((a, b)) = self.interval {
            if !(a >= T::zero()) || !(b > a) {
                return Err(Error::InvalidArgument(format!(
                    "inequality domain needs 0 <= a < b, got [{a}, {b}]"
                )));
            }
            return Ok((a, b));
        }
        match self.profile.support_radius() {
            Some(r) if r > T::zero() => Ok((real(DOMAIN_FLOOR), r)),
            _ => Err(Error::InvalidArgument(
                "profile has unbounded support; supply an explicit interval".into(),
            )),
        }
    }

    /// Compute the three integrals and assemble the margin report.
    pub fn evaluate(&self) -> Result<InequalityReport<T>> {
        let c = constants::<T>(self.space.dim(), self.alpha);
        if !c.is_valid(self.kind) {
            return Err(Error::HypothesisViolation {
                inequality: self.kind.label().into(),
                detail: format!(
                    "constants are not proved for n = {}, alpha = {}",
                    self.space.dim(),
                    self.alpha
                ),
            });
        }
        let (a, b) = self.domain()?;
        let spec = {
            let mut s = QuadratureSpec::new(a, b);
            s.rel_tol = self.rel_tol;
            s.singular_a = true;
            s
        };

        let alpha = self.alpha;
        let two = real::<T>(2.0);
        let four = real::<T>(4.0);
        let space = self.space;
        let f = self.profile;

        let lhs = match self.kind {
            InequalityKind::Hardy => integrate_radial(
                space,
                |rho: T| {
                    let g = space.radial_gradient_norm(f, rho);
                    rho.powf(alpha) * g * g
                },
                &spec,
            )?,
            InequalityKind::Rellich | InequalityKind::HardyRellich => integrate_radial(
                space,
                |rho: T| {
                    let lap = f.second_deriv(rho)
                        + real_from_usize::<T>(space.dim() - 1) * space.ct(rho) * f.deriv(rho);
                    rho.powf(alpha) * lap * lap
                },
                &spec,
            )?,
        };

        let rhs_main = match self.kind {
            InequalityKind::Hardy => integrate_radial(
                space,
                |rho: T| {
                    let v = f.value(rho);
                    rho.powf(alpha - two) * v * v
                },
                &spec,
            )?,
            InequalityKind::Rellich => integrate_radial(
                space,
                |rho: T| {
                    let v = f.value(rho);
                    rho.powf(alpha - four) * v * v
                },
                &spec,
            )?,
            InequalityKind::HardyRellich => integrate_radial(
                space,
                |rho: T| {
                    let g = space.radial_gradient_norm(f, rho);
                    rho.powf(alpha - two) * g * g
                },
                &spec,
            )?,
        };

        let remainder_exponent = match self.kind {
            InequalityKind::Hardy => alpha - two,
            InequalityKind::Rellich | InequalityKind::HardyRellich => alpha - four,
        };
        let rhs_remainder = if space.curvature() == T::zero() {
            // The remainder weight vanishes identically in the flat case.
            crate::quadrature::QuadratureResult {
                value: T::zero(),
                error_estimate: T::zero(),
                subdivisions: 0,
                converged: true,
            }
        } else {
            integrate_radial(
                space,
                |rho: T| {
                    let v = f.value(rho);
                    rho.powf(remainder_exponent) * space.remainder(rho) * v * v
                },
                &spec,
            )?
        };

        let main_constant = c.main_constant(self.kind);
        let remainder_constant = c.remainder_constant(self.kind);
        let margin =
            lhs.value - main_constant * rhs_main.value - remainder_constant * rhs_remainder.value;
        let quadrature_error = lhs.error_estimate
            + main_constant.abs() * rhs_main.error_estimate
            + remainder_constant.abs() * rhs_remainder.error_estimate;

        Ok(InequalityReport {
            kind: self.kind,
            dim: space.dim(),
            alpha,
            curvature: space.curvature(),
            gamma: c.gamma,
            main_constant,
            remainder_constant,
            lhs: lhs.value,
            rhs_main: rhs_main.value,
            rhs_remainder: rhs_remainder.value,
            margin,
            quadrature_error,
            converged: lhs.converged && rhs_main.converged && rhs_remainder.converged,
        })
    }
}

/// Defect of the integration by parts identity
/// int u^2 Lap(rho^{alpha-2}) dV = int rho^{alpha-2} Lap(u^2) dV
/// for compactly supported radial u; vanishes on model spaces.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GreenDeflection<T> {
    /// term_weight - term_function.
    pub value: T,
    /// int u^2 Lap(rho^{alpha-2}) dV.
    pub term_weight: T,
    /// int rho^{alpha-2} Lap(u^2) dV.
    pub term_function: T,
    /// |value| / max(|term_weight|, |term_function|).
    pub relative_deflection: T,
    pub quadrature_error: T,
}

/// Evaluate the Green deflection for a compactly supported radial profile.
/// Requires n - 4 + alpha > 0 so the inner boundary terms vanish.
pub fn green_deflection<T: Real, P: RadialProfile<T>>(
    space: &ModelSpace<T>,
    profile: &P,
    alpha: T,
    rel_tol: T,
) -> Result<GreenDeflection<T>> {
    let n = space.dim();
    let shift = real_from_usize::<T>(n) - real::<T>(4.0) + alpha;
    if !(shift > T::zero()) {
        return Err(Error::HypothesisViolation {
            inequality: "green".into(),
            detail: format!("needs n - 4 + alpha > 0, got n = {n}, alpha = {alpha}"),
        });
    }
    let support = profile.support_radius().ok_or_else(|| {
        Error::InvalidArgument("green deflection needs a compactly supported profile".into())
    })?;

    let mut spec = QuadratureSpec::new(real(DOMAIN_FLOOR), support);
    spec.rel_tol = rel_tol;
    spec.singular_a = true;

    let two = real::<T>(2.0);
    let three = real::<T>(3.0);
    let four = real::<T>(4.0);
    let n_minus_1 = real_from_usize::<T>(n - 1);

    // Lap(rho^{alpha-2}) = (alpha-2)(alpha-3 + (n-1) rho ct(rho)) rho^{alpha-4}.
    let term_weight = integrate_radial(
        space,
        |rho: T| {
            let v = profile.value(rho);
            let lap_w = (alpha - two)
                * (alpha - three + n_minus_1 * rho * space.ct(rho))
                * rho.powf(alpha - four);
            v * v * lap_w
        },
        &spec,
    )?;

    let squared = Squared(profile);
    let term_function = integrate_radial(
        space,
        |rho: T| {
            let lap_sq = squared.second_deriv(rho) + n_minus_1 * space.ct(rho) * squared.deriv(rho);
            rho.powf(alpha - two) * lap_sq
        },
        &spec,
    )?;

    let value = term_weight.value - term_function.value;
    let scale = term_weight.value.abs().max(term_function.value.abs());
    let relative_deflection = if scale > T::zero() {
        value.abs() / scale
    } else {
        T::zero()
    };
    Ok(GreenDeflection {
        value,
        term_weight: term_weight.value,
        term_function: term_function.value,
        relative_deflection,
        quadrature_error: term_weight.error_estimate + term_function.error_estimate,
    })
}
