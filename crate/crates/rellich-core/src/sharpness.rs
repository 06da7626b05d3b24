//! Sharpness evidence for the second-order inequalities: build the
//! near-extremal family, sweep the truncation parameter, and extrapolate
//! the Rayleigh ratios to their limit.
//!
//! The family is u_eps(rho) = m_eps(rho) * psi(rho), where m_eps is the
//! truncated power (max{eps, rho})^{-gamma} with its kink replaced by a C^2
//! smoothstep blend on [eps - eta, eps + eta], and psi is a C^2 cutoff that
//! is 1 up to radius r and 0 from radius R on. As eps -> 0 the Rayleigh
//! ratio I1/I2 (Laplacian energy over the rho^{alpha-4} mass) tends to the
//! sharp Rellich constant, and I1/I3 (over the weighted gradient energy)
//! tends to the sharp Hardy-Rellich constant.
//!
//! The truncated-power core contributes integrals that diverge like the
//! logarithmic volume LV(eps) = int_eps^r rho^{-n} dV, while the blend and
//! cutoff zones contribute eps-independent amounts; the swept ratio is
//! therefore a Moebius function of ln(1/eps). The extrapolator fits that
//! three-parameter model (limit, amplitude, log offset) by linearized least
//! squares and falls back to the simpler limit + b/ln(1/eps) model when the
//! rational fit is degenerate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequalities::{constants, InequalityKind, DOMAIN_FLOOR};
use crate::matrix::SquareMatrix;
use crate::models::ModelSpace;
use crate::profiles::RadialProfile;
use crate::quadrature::{integrate_radial, QuadratureSpec};
use crate::scalar::{real, real_from_usize, Real};
use crate::special::{QuinticStep, SepticStep, Smoothstep};

/// Default mollification half-width as a fraction of eps.
pub const DEFAULT_ETA_REL: f64 = 0.1;

/// Cutoff smoothstep choice; sweep limits must be insensitive to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffVariant {
    Quintic,
    Septic,
}

impl CutoffVariant {
    fn eval(&self, t: f64) -> (f64, f64, f64) {
        match self {
            CutoffVariant::Quintic => {
                let s = QuinticStep;
                (s.value(t), s.deriv(t), s.second_deriv(t))
            }
            CutoffVariant::Septic => {
                let s = SepticStep;
                (s.value(t), s.deriv(t), s.second_deriv(t))
            }
        }
    }
}

/// The C^2 near-extremal profile m_eps(rho) * psi(rho).
#[derive(Debug, Clone)]
pub struct ExtremalProfile<T> {
    gamma: T,
    epsilon: T,
    eta: T,
    cutoff_start: T,
    cutoff_end: T,
    variant: CutoffVariant,
}

impl<T: Real> ExtremalProfile<T> {
    /// Profile with explicit decay exponent gamma > 0. Zones must be
    /// ordered: 0 < eps - eta, eta < eps/2, eps + eta < r < R.
    pub fn with_gamma(
        gamma: T,
        epsilon: T,
        eta: T,
        cutoff_start: T,
        cutoff_end: T,
        variant: CutoffVariant,
    ) -> Result<Self> {
        if !(gamma > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "gamma must be > 0, got {gamma}"
            )));
        }
        if !(epsilon > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be > 0, got {epsilon}"
            )));
        }
        if !(eta > T::zero() && eta < epsilon * real::<T>(0.5)) {
            return Err(Error::InvalidArgument(format!(
                "blend half-width must satisfy 0 < eta < eps/2, got eta = {eta}, eps = {epsilon}"
            )));
        }
        if !(epsilon + eta < cutoff_start) {
            return Err(Error::InvalidArgument(format!(
                "blend zone must end before the cutoff starts: eps + eta = {} >= r = {}",
                epsilon + eta,
                cutoff_start
            )));
        }
        if !(cutoff_start < cutoff_end) {
            return Err(Error::InvalidArgument(format!(
                "cutoff needs r < R, got r = {cutoff_start}, R = {cutoff_end}"
            )));
        }
        Ok(Self {
            gamma,
            epsilon,
            eta,
            cutoff_start,
            cutoff_end,
            variant,
        })
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// Radii at which the piecewise definition changes; integrators should
    /// use them as panel edges.
    pub fn knots(&self) -> [T; 4] {
        [
            self.epsilon - self.eta,
            self.epsilon + self.eta,
            self.cutoff_start,
            self.cutoff_end,
        ]
    }

    /// Truncated power with C^2 blend: value, first and second derivative.
    fn core(&self, rho: T) -> (T, T, T) {
        let g = self.gamma;
        let plateau = self.epsilon.powf(-g);
        let lo = self.epsilon - self.eta;
        let hi = self.epsilon + self.eta;
        if rho <= lo {
            return (plateau, T::zero(), T::zero());
        }
        let one = T::one();
        let two = real::<T>(2.0);
        if rho >= hi {
            let v = rho.powf(-g);
            return (v, -g * v / rho, g * (g + one) * v / (rho * rho));
        }
        // Blend zone: m = plateau + S(t) (rho^{-g} - plateau) with the
        // quintic step, t in [0, 1].
        let width = two * self.eta;
        let t = ((rho - lo) / width).to_f64().unwrap_or(0.0);
        let quintic = QuinticStep;
        let (s, ds, dds) = (
            real::<T>(quintic.value(t)),
            real::<T>(quintic.deriv(t)) / width,
            real::<T>(quintic.second_deriv(t)) / (width * width),
        );
        let p = rho.powf(-g);
        let dp = -g * p / rho;
        let ddp = g * (g + one) * p / (rho * rho);
        let gap = p - plateau;
        (
            plateau + s * gap,
            ds * gap + s * dp,
            dds * gap + two * ds * dp + s * ddp,
        )
    }

    /// Cutoff function: value, first and second derivative.
    fn cutoff(&self, rho: T) -> (T, T, T) {
        if rho <= self.cutoff_start {
            return (T::one(), T::zero(), T::zero());
        }
        if rho >= self.cutoff_end {
            return (T::zero(), T::zero(), T::zero());
        }
        let width = self.cutoff_end - self.cutoff_start;
        let t = ((rho - self.cutoff_start) / width).to_f64().unwrap_or(0.0);
        let (s, ds, dds) = self.variant.eval(t);
        (
            T::one() - real::<T>(s),
            -real::<T>(ds) / width,
            -real::<T>(dds) / (width * width),
        )
    }
}

impl<T: Real> RadialProfile<T> for ExtremalProfile<T> {
    fn value(&self, rho: T) -> T {
        let (m, _, _) = self.core(rho);
        let (p, _, _) = self.cutoff(rho);
        m * p
    }

    fn deriv(&self, rho: T) -> T {
        let (m, dm, _) = self.core(rho);
        let (p, dp, _) = self.cutoff(rho);
        dm * p + m * dp
    }

    fn second_deriv(&self, rho: T) -> T {
        let (m, dm, ddm) = self.core(rho);
        let (p, dp, ddp) = self.cutoff(rho);
        ddm * p + real::<T>(2.0) * dm * dp + m * ddp
    }

    fn support_radius(&self) -> Option<T> {
        Some(self.cutoff_end)
    }
}

/// Near-extremal profile for the second-order inequalities at (n, alpha):
/// decay exponent gamma = (n - 4 + alpha)/2. Requires n - 4 + alpha > 0.
pub fn extremal_profile<T: Real>(
    dim: usize,
    alpha: T,
    epsilon: T,
    eta: T,
    cutoff_start: T,
    cutoff_end: T,
    variant: CutoffVariant,
) -> Result<ExtremalProfile<T>> {
    let c = constants::<T>(dim, alpha);
    if !(c.gamma > T::zero()) {
        return Err(Error::HypothesisViolation {
            inequality: "sharpness".into(),
            detail: format!("needs n - 4 + alpha > 0, got n = {dim}, alpha = {alpha}"),
        });
    }
    ExtremalProfile::with_gamma(c.gamma, epsilon, eta, cutoff_start, cutoff_end, variant)
}

/// Sweep controls: cutoff radii, relative blend width, truncation radii,
/// and integration tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig<T> {
    /// Cutoff start radius r (profile is the pure power below it).
    pub cutoff_start: T,
    /// Cutoff end radius R (support).
    pub cutoff_end: T,
    /// Blend half-width as a fraction of eps; must be < 1/2.
    pub eta_rel: T,
    /// Strictly decreasing truncation radii in (0, min(1, r)).
    pub epsilons: Vec<T>,
    /// Relative tolerance for the radial integrals.
    pub rel_tol: T,
    pub cutoff: CutoffVariant,
}

impl<T: Real> SweepConfig<T> {
    pub fn new(epsilons: Vec<T>) -> Self {
        Self {
            cutoff_start: real(0.1),
            cutoff_end: real(0.2),
            eta_rel: real(DEFAULT_ETA_REL),
            epsilons,
            rel_tol: real(1e-10),
            cutoff: CutoffVariant::Quintic,
        }
    }

    /// Check the geometric constraints before any integral runs.
    pub fn validate(&self) -> Result<()> {
        if !(self.eta_rel > T::zero() && self.eta_rel < real::<T>(0.5)) {
            return Err(Error::InvalidArgument(format!(
                "eta_rel must lie in (0, 1/2), got {}",
                self.eta_rel
            )));
        }
        if !(self.cutoff_start > T::zero() && self.cutoff_start < self.cutoff_end) {
            return Err(Error::InvalidArgument(format!(
                "cutoff radii need 0 < r < R, got r = {}, R = {}",
                self.cutoff_start, self.cutoff_end
            )));
        }
        if self.epsilons.is_empty() {
            return Err(Error::InsufficientData(
                "sweep needs at least one epsilon".into(),
            ));
        }
        let one = T::one();
        for pair in self.epsilons.windows(2) {
            if !(pair[1] < pair[0]) {
                return Err(Error::InvalidArgument(
                    "epsilons must be strictly decreasing".into(),
                ));
            }
        }
        for &eps in &self.epsilons {
            if !(eps > T::zero()) || !(eps < one) {
                return Err(Error::InvalidArgument(format!(
                    "epsilons must lie in (0, 1), got {eps}"
                )));
            }
            if !(eps * (one + self.eta_rel) < self.cutoff_start) {
                return Err(Error::InvalidArgument(format!(
                    "blend zone of eps = {eps} reaches the cutoff start r = {}",
                    self.cutoff_start
                )));
            }
        }
        if !(self.rel_tol > T::zero()) {
            return Err(Error::InvalidArgument("rel_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Echo of the geometry and parameters a sweep actually used.
#[derive(Debug, Clone, Serialize)]
pub struct SweepParams<T> {
    pub dim: usize,
    pub alpha: T,
    pub curvature: T,
    pub cutoff_start: T,
    pub cutoff_end: T,
    pub eta_rel: T,
    pub epsilons: Vec<T>,
    pub cutoff: CutoffVariant,
}

/// One truncation radius: the two integrals, their ratio, and the
/// logarithmic volume of the core annulus.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepPoint<T> {
    pub epsilon: T,
    /// I1: int rho^alpha (Lap u)^2 dV.
    pub numerator: T,
    /// I2 (Rellich): int rho^{alpha-4} u^2 dV, or
    /// I3 (Hardy-Rellich): int rho^{alpha-2} F*(Du)^2 dV.
    pub denominator: T,
    pub ratio: T,
    /// LV(eps) = int_eps^r rho^{-n} dV; diverges like ln(1/eps).
    pub log_volume: T,
    /// Propagated quadrature error of the ratio.
    pub quadrature_error: T,
}

/// Fit models for the eps -> 0 limit of the swept ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtrapolationModel {
    /// ratio = limit + coefficient / (ln(1/eps) - offset).
    RationalLog,
    /// ratio = limit + coefficient / ln(1/eps).
    InverseLog,
}

/// Extrapolated limit and the fitted nuisance parameters.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Extrapolation<T> {
    pub limit: T,
    pub coefficient: T,
    pub offset: T,
    pub model: ExtrapolationModel,
    /// Root-mean-square misfit in ratio units.
    pub rms_residual: T,
}

/// A full sharpness sweep with its extrapolation and envelope data.
#[derive(Debug, Clone, Serialize)]
pub struct SharpnessSweep<T> {
    pub kind: InequalityKind,
    pub params: SweepParams<T>,
    pub points: Vec<SweepPoint<T>>,
    pub sharp_constant: T,
    pub extrapolation: Extrapolation<T>,
    /// |limit - sharp| / sharp.
    pub relative_gap: T,
    /// gamma^2 ((n - alpha)/2 + r)^2: the ratio must stay below this plus
    /// the cutoff contribution divided by the log volume.
    pub envelope_bound: T,
    /// eps-independent numerator contribution of the blend and cutoff
    /// zones, measured at the largest eps.
    pub cutoff_contribution: T,
    /// Ratios decrease monotonically along the sweep.
    pub ratios_decreasing: bool,
}

impl<T: Real> SharpnessSweep<T> {
    pub fn extrapolated_limit(&self) -> T {
        self.extrapolation.limit
    }

    /// Envelope certificate for one point: the excess of the ratio over the
    /// envelope bound must be covered by cutoff_contribution / log_volume,
    /// up to quadrature slack.
    pub fn envelope_satisfied(&self, point: &SweepPoint<T>) -> bool {
        let slack =
            real::<T>(10.0) * point.quadrature_error + real::<T>(1e-9) * self.envelope_bound.abs();
        point.ratio - self.envelope_bound <= self.cutoff_contribution / point.log_volume + slack
    }
}

/// Sweep the truncation radius for the chosen second-order inequality and
/// extrapolate the Rayleigh ratio to eps -> 0.
pub fn rayleigh_sweep<T: Real>(
    space: &ModelSpace<T>,
    alpha: T,
    config: &SweepConfig<T>,
    kind: InequalityKind,
) -> Result<SharpnessSweep<T>> {
    config.validate()?;
    let dim = space.dim();
    let c = constants::<T>(dim, alpha);
    match kind {
        InequalityKind::Rellich | InequalityKind::HardyRellich => {
            if !c.is_valid(kind) {
                return Err(Error::HypothesisViolation {
                    inequality: kind.label().into(),
                    detail: format!("constants not proved for n = {dim}, alpha = {alpha}"),
                });
            }
        }
        InequalityKind::Hardy => {
            return Err(Error::InvalidArgument(
                "sharpness sweeps cover the second-order inequalities only".into(),
            ));
        }
    }
    let sharp_constant = c.main_constant(kind);
    let two = real::<T>(2.0);
    let four = real::<T>(4.0);
    let n_minus_1 = real_from_usize::<T>(dim - 1);

    let numerator_integrand = |profile: &ExtremalProfile<T>, rho: T| -> T {
        let lap = profile.second_deriv(rho) + n_minus_1 * space.ct(rho) * profile.deriv(rho);
        rho.powf(alpha) * lap * lap
    };

    let mut points = Vec::with_capacity(config.epsilons.len());
    let mut cutoff_contribution = T::zero();
    for (index, &eps) in config.epsilons.iter().enumerate() {
        let eta = config.eta_rel * eps;
        let profile = extremal_profile(
            dim,
            alpha,
            eps,
            eta,
            config.cutoff_start,
            config.cutoff_end,
            config.cutoff,
        )?;
        let knots = profile.knots();
        let spec = {
            let mut s = QuadratureSpec::new(real(DOMAIN_FLOOR), config.cutoff_end);
            s.rel_tol = config.rel_tol;
            s.singular_a = true;
            s.breakpoints = knots.to_vec();
            s
        };

        let numerator = integrate_radial(space, |rho| numerator_integrand(&profile, rho), &spec)?;
        let denominator = match kind {
            InequalityKind::Rellich => integrate_radial(
                space,
                |rho: T| {
                    let v = profile.value(rho);
                    rho.powf(alpha - four) * v * v
                },
                &spec,
            )?,
            InequalityKind::HardyRellich => integrate_radial(
                space,
                |rho: T| {
                    let g = space.radial_gradient_norm(&profile, rho);
                    rho.powf(alpha - two) * g * g
                },
                &spec,
            )?,
            InequalityKind::Hardy => unreachable!("rejected above"),
        };
        if !(denominator.value > T::zero()) {
            return Err(Error::NonConvergence {
                context: format!("sweep denominator at eps = {eps} is not positive"),
                residual: denominator.value.to_f64().unwrap_or(f64::NAN),
            });
        }
        let ratio = numerator.value / denominator.value;

        // Logarithmic volume of the core annulus [eps, r].
        let lv_spec = {
            let mut s = QuadratureSpec::new(eps, config.cutoff_start);
            s.rel_tol = config.rel_tol;
            s.singular_a = true;
            s
        };
        let n_exp = -real_from_usize::<T>(dim);
        let log_volume = integrate_radial(space, |rho: T| rho.powf(n_exp), &lv_spec)?;

        // The flat closed form n omega_n ln(r/eps) is a lower bound for the
        // log volume on every model; a violation beyond quadrature noise
        // means the integrator or the geometry is wrong.
        let flat_bound = real_from_usize::<T>(dim)
            * crate::special::unit_ball_volume::<T>(dim)
            * (config.cutoff_start / eps).ln();
        let deficit = flat_bound - log_volume.value;
        if deficit > real::<T>(10.0) * log_volume.error_estimate + real::<T>(1e-9) * flat_bound {
            return Err(Error::NonConvergence {
                context: format!("log-volume lower bound violated at eps = {eps}"),
                residual: deficit.to_f64().unwrap_or(f64::NAN),
            });
        }

        let quadrature_error = (numerator.error_estimate
            + ratio.abs() * denominator.error_estimate)
            / denominator.value;

        // eps-independent zones measured once, at the largest eps: blend
        // plus cutoff annulus contributions to the numerator.
        if index == 0 {
            let blend_spec = {
                let mut s = QuadratureSpec::new(knots[0], knots[1]);
                s.rel_tol = config.rel_tol;
                s
            };
            let cutoff_spec = {
                let mut s = QuadratureSpec::new(knots[2], knots[3]);
                s.rel_tol = config.rel_tol;
                s
            };
            let blend =
                integrate_radial(space, |rho| numerator_integrand(&profile, rho), &blend_spec)?;
            let tail = integrate_radial(
                space,
                |rho| numerator_integrand(&profile, rho),
                &cutoff_spec,
            )?;
            cutoff_contribution = blend.value + tail.value;
        }

        points.push(SweepPoint {
            epsilon: eps,
            numerator: numerator.value,
            denominator: denominator.value,
            ratio,
            log_volume: log_volume.value,
            quadrature_error,
        });
    }

    let ratios_decreasing = points.windows(2).all(|w| w[1].ratio < w[0].ratio);
    let extrapolation = extrapolate(&points)?;
    let relative_gap = (extrapolation.limit - sharp_constant).abs() / sharp_constant;

    let half_span = (real_from_usize::<T>(dim) - alpha) / two + config.cutoff_start;
    let envelope_bound = c.gamma * c.gamma * half_span * half_span;

    Ok(SharpnessSweep {
        kind,
        params: SweepParams {
            dim,
            alpha,
            curvature: space.curvature(),
            cutoff_start: config.cutoff_start,
            cutoff_end: config.cutoff_end,
            eta_rel: config.eta_rel,
            epsilons: config.epsilons.clone(),
            cutoff: config.cutoff,
        },
        points,
        sharp_constant,
        extrapolation,
        relative_gap,
        envelope_bound,
        cutoff_contribution,
        ratios_decreasing,
    })
}

/// Extrapolate swept ratios to eps -> 0.
///
/// Needs at least four points spanning a decade of eps. Primary model:
/// ratio = L + k/(ln(1/eps) - sigma), fitted by regressing
/// ratio * ln(1/eps) on [ln(1/eps), ratio, 1]. Falls back to
/// ratio = L + b/ln(1/eps) when the rational fit is singular, puts its
/// pole inside the data, or fits worse.
pub fn extrapolate<T: Real>(points: &[SweepPoint<T>]) -> Result<Extrapolation<T>> {
    if points.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "extrapolation needs >= 4 sweep points, got {}",
            points.len()
        )));
    }
    let max_eps = points.iter().map(|p| p.epsilon).fold(T::zero(), T::max);
    let min_eps = points.iter().map(|p| p.epsilon).fold(T::infinity(), T::min);
    if !(max_eps / min_eps >= real::<T>(10.0)) {
        return Err(Error::InsufficientData(format!(
            "extrapolation needs a decade of eps spread, got {max_eps} .. {min_eps}"
        )));
    }
    for p in points {
        if !(p.epsilon > T::zero() && p.epsilon < T::one()) {
            return Err(Error::InvalidArgument(format!(
                "extrapolation needs eps in (0, 1), got {}",
                p.epsilon
            )));
        }
    }

    let ys: Vec<T> = points.iter().map(|p| (T::one() / p.epsilon).ln()).collect();
    let ratios: Vec<T> = points.iter().map(|p| p.ratio).collect();
    let count = real_from_usize::<T>(points.len());

    // Fallback model first: ratio = L + b x with x = 1/ln(1/eps).
    let xs: Vec<T> = ys.iter().map(|&y| T::one() / y).collect();
    let mean_x = xs.iter().copied().sum::<T>() / count;
    let mean_r = ratios.iter().copied().sum::<T>() / count;
    let var_x: T = xs.iter().map(|&x| (x - mean_x) * (x - mean_x)).sum();
    let cov: T = xs
        .iter()
        .zip(&ratios)
        .map(|(&x, &r)| (x - mean_x) * (r - mean_r))
        .sum();
    let slope = cov / var_x;
    let intercept = mean_r - slope * mean_x;
    let fallback_rms = rms(
        ratios
            .iter()
            .zip(&xs)
            .map(|(&r, &x)| r - (intercept + slope * x)),
        points.len(),
    );
    let fallback = Extrapolation {
        limit: intercept,
        coefficient: slope,
        offset: T::zero(),
        model: ExtrapolationModel::InverseLog,
        rms_residual: fallback_rms,
    };

    // Rational model: ratio * y = L y + sigma ratio + (k - L sigma);
    // normal equations for the design [y, ratio, 1].
    let mut ata = [[T::zero(); 3]; 3];
    let mut atz = [T::zero(); 3];
    for (i, (&y, &r)) in ys.iter().zip(&ratios).enumerate() {
        let _ = i;
        let row = [y, r, T::one()];
        let z = r * y;
        for a in 0..3 {
            for b in 0..3 {
                ata[a][b] = ata[a][b] + row[a] * row[b];
            }
            atz[a] = atz[a] + row[a] * z;
        }
    }
    let gram = SquareMatrix::from_row_major(
        3,
        vec![
            ata[0][0], ata[0][1], ata[0][2], ata[1][0], ata[1][1], ata[1][2], ata[2][0], ata[2][1],
            ata[2][2],
        ],
    )
    .ok()
    .and_then(|m| m.cholesky().ok());
    let Some(chol) = gram else {
        return Ok(fallback);
    };
    let sol = chol.solve(&atz);
    let (limit, offset) = (sol[0], sol[1]);
    let coefficient = sol[2] + limit * offset;
    if !(limit.is_finite() && offset.is_finite() && coefficient.is_finite()) {
        return Ok(fallback);
    }
    // The fitted pole must sit well outside the data window.
    let min_y = ys.iter().copied().fold(T::infinity(), T::min);
    if offset >= min_y - real::<T>(0.5) {
        return Ok(fallback);
    }
    let rational_rms = rms(
        ratios
            .iter()
            .zip(&ys)
            .map(|(&r, &y)| r - (limit + coefficient / (y - offset))),
        points.len(),
    );
    if rational_rms <= fallback_rms {
        Ok(Extrapolation {
            limit,
            coefficient,
            offset,
            model: ExtrapolationModel::RationalLog,
            rms_residual: rational_rms,
        })
    } else {
        Ok(fallback)
    }
}

fn rms<T: Real>(residuals: impl Iterator<Item = T>, count: usize) -> T {
    let sum: T = residuals.map(|r| r * r).sum();
    (sum / real_from_usize::<T>(count)).sqrt()
}
