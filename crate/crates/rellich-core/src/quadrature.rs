//! Adaptive one-dimensional quadrature built on the 15-point
//! Gauss-Kronrod rule with its embedded 7-point Gauss estimate.
//!
//! Panels are refined worst-error-first (deterministic tie-break by
//! insertion order) until the summed error estimate meets the mixed
//! relative/absolute tolerance. Known singular endpoints get a geometric
//! initial grading, and caller-supplied breakpoints become panel edges so
//! kinks never sit inside a panel. Radial integrals over a model space
//! multiply in the distance-sphere area automatically.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::models::ModelSpace;
use crate::scalar::{real, Real};

/// 15-point Kronrod abscissae on [0, 1] (symmetric about 0; last is the
/// center). Stated to full double precision.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// 7-point Gauss weights for the odd-indexed abscissae and the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_6,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Geometric grading levels used toward a singular endpoint sitting at 0.
const GRADING_LEVELS_AT_ZERO: usize = 48;
const GRADING_LEVELS_MAX: usize = 60;
const GRADING_LEVELS_MIN: usize = 4;

/// Integration request: interval, tolerances, and structural hints.
#[derive(Debug, Clone)]
pub struct QuadratureSpec<T> {
    pub a: T,
    pub b: T,
    /// Relative tolerance on the accumulated error estimate.
    pub rel_tol: T,
    /// Absolute tolerance floor.
    pub abs_tol: T,
    /// Cap on adaptive panel splits before giving up.
    pub max_subdivisions: usize,
    /// Grade initial panels geometrically toward `a`.
    pub singular_a: bool,
    /// Grade initial panels geometrically toward `b`.
    pub singular_b: bool,
    /// Interior points forced to be panel edges (kinks, knots).
    pub breakpoints: Vec<T>,
}

impl<T: Real> QuadratureSpec<T> {
    pub fn new(a: T, b: T) -> Self {
        Self {
            a,
            b,
            rel_tol: real(1e-9),
            abs_tol: real(1e-14),
            max_subdivisions: 1 << 16,
            singular_a: false,
            singular_b: false,
            breakpoints: Vec::new(),
        }
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult<T> {
    pub value: T,
    /// Sum of per-panel |Kronrod - Gauss| estimates.
    pub error_estimate: T,
    /// Number of panel splits performed.
    pub subdivisions: usize,
    /// Whether the tolerance was met before the subdivision cap.
    pub converged: bool,
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    /// Insertion counter; breaks error ties first-in-first-out so the
    /// refinement order (and hence the result) is deterministic.
    counter: u64,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.counter == other.counter
    }
}
impl<T: Real> Eq for Panel<T> {}
impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap on error; on ties, earlier insertion wins.
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.counter.cmp(&self.counter))
    }
}

/// One Gauss-Kronrod 15 evaluation on [a, b].
fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Result<(T, T)> {
    let half = (b - a) * real::<T>(0.5);
    let center = (a + b) * real::<T>(0.5);
    let eval = |x: T| -> Result<T> {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteSample {
                rho: x.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(v)
    };
    let f_center = eval(center)?;
    let mut resk = real::<T>(WGK[7]) * f_center;
    let mut resg = real::<T>(WG[3]) * f_center;
    for j in 0..7 {
        let offset = half * real::<T>(XGK[j]);
        let pair = eval(center - offset)? + eval(center + offset)?;
        resk = resk + real::<T>(WGK[j]) * pair;
        if j % 2 == 1 {
            resg = resg + real::<T>(WG[j / 2]) * pair;
        }
    }
    let value = resk * half;
    let error = ((resk - resg) * half).abs();
    Ok((value, error))
}

fn kahan_sum<T: Real>(values: impl Iterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Panel edges: endpoints, filtered breakpoints, and geometric grading
/// toward any flagged singular endpoint.
fn initial_edges<T: Real>(spec: &QuadratureSpec<T>) -> Vec<T> {
    let mut interior: Vec<T> = spec
        .breakpoints
        .iter()
        .copied()
        .filter(|&x| x > spec.a && x < spec.b)
        .collect();
    interior.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    interior.dedup();

    let mut edges = Vec::with_capacity(interior.len() + 2);
    edges.push(spec.a);
    edges.extend(interior);
    edges.push(spec.b);

    if spec.singular_a {
        let first = edges[1];
        let graded = grade_toward(spec.a, first, true);
        edges.splice(1..1, graded);
    }
    if spec.singular_b {
        let len = edges.len();
        let last_inner = edges[len - 2];
        let graded = grade_toward(last_inner, spec.b, false);
        edges.splice(len - 1..len - 1, graded);
    }
    edges
}

/// Interior grading points accumulating geometrically at `lo` (when
/// `toward_lo`) or at `hi`. Level count adapts to how far the endpoint is
/// from zero relative to the panel width.
fn grade_toward<T: Real>(lo: T, hi: T, toward_lo: bool) -> Vec<T> {
    let width = hi - lo;
    let endpoint = if toward_lo { lo } else { hi };
    let levels = if endpoint.abs() > T::zero() {
        let ratio = (width / endpoint.abs()).to_f64().unwrap_or(f64::INFINITY);
        if ratio.is_finite() && ratio > 0.0 {
            (ratio.log2().ceil() as isize)
                .clamp(GRADING_LEVELS_MIN as isize, GRADING_LEVELS_MAX as isize)
                as usize
        } else {
            GRADING_LEVELS_MIN
        }
    } else {
        GRADING_LEVELS_AT_ZERO
    };
    let half = real::<T>(0.5);
    let mut points = Vec::with_capacity(levels);
    let mut step = width;
    for _ in 0..levels {
        step = step * half;
        let p = if toward_lo { lo + step } else { hi - step };
        if p > lo && p < hi {
            points.push(p);
        }
    }
    if toward_lo {
        points.reverse();
    }
    points.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    points.dedup();
    points
}

/// Adaptively integrate `f` over the requested interval.
pub fn integrate<T: Real, F: Fn(T) -> T>(
    f: F,
    spec: &QuadratureSpec<T>,
) -> Result<QuadratureResult<T>> {
    if !spec.a.is_finite() || !spec.b.is_finite() {
        return Err(Error::InvalidArgument(
            "integration endpoints must be finite".into(),
        ));
    }
    if spec.a > spec.b {
        return Err(Error::InvalidArgument(format!(
            "integration interval is reversed: [{}, {}]",
            spec.a, spec.b
        )));
    }
    if spec.rel_tol < T::zero() || spec.abs_tol < T::zero() {
        return Err(Error::InvalidArgument(
            "tolerances must be nonnegative".into(),
        ));
    }
    if spec.a == spec.b {
        return Ok(QuadratureResult {
            value: T::zero(),
            error_estimate: T::zero(),
            subdivisions: 0,
            converged: true,
        });
    }

    let mut heap: BinaryHeap<Panel<T>> = BinaryHeap::new();
    let mut frozen: Vec<Panel<T>> = Vec::new();
    let mut counter: u64 = 0;
    let mut total_value = T::zero();
    let mut total_error = T::zero();

    let edges = initial_edges(spec);
    for pair in edges.windows(2) {
        let (value, error) = gk15(&f, pair[0], pair[1])?;
        total_value = total_value + value;
        total_error = total_error + error;
        heap.push(Panel {
            a: pair[0],
            b: pair[1],
            value,
            error,
            counter,
        });
        counter += 1;
    }

    let tolerance =
        |value: T, err: T| -> bool { err <= (spec.rel_tol * value.abs()).max(spec.abs_tol) };

    let mut subdivisions = 0usize;
    let mut converged = tolerance(total_value, total_error);
    while !converged {
        if subdivisions >= spec.max_subdivisions {
            break;
        }
        let Some(worst) = heap.pop() else {
            // Every panel hit the width floor; the estimate cannot improve.
            break;
        };
        let mid = (worst.a + worst.b) * real::<T>(0.5);
        if !(mid > worst.a && mid < worst.b) {
            // Width underflow: keep the panel's contribution but stop
            // refining it.
            frozen.push(worst);
            continue;
        }
        let (lv, le) = gk15(&f, worst.a, mid)?;
        let (rv, re) = gk15(&f, mid, worst.b)?;
        total_value = total_value - worst.value + lv + rv;
        total_error = total_error - worst.error + le + re;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
            counter,
        });
        counter += 1;
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
            counter,
        });
        counter += 1;
        subdivisions += 1;
        converged = tolerance(total_value, total_error);
    }

    // Recompute the totals from scratch in deterministic (left-to-right)
    // order; the incremental updates above accumulate cancellation drift.
    let mut panels: Vec<Panel<T>> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap_or(Ordering::Equal));
    let value = kahan_sum(panels.iter().map(|p| p.value));
    let error_estimate = kahan_sum(panels.iter().map(|p| p.error));
    let converged = tolerance(value, error_estimate);

    Ok(QuadratureResult {
        value,
        error_estimate,
        subdivisions,
        converged,
    })
}

/// Integrate rho -> f(rho) * sphere_area(rho) over [spec.a, spec.b]:
/// the radial form of integrating the radial function f over the annulus.
pub fn integrate_radial<T: Real, F: Fn(T) -> T>(
    space: &ModelSpace<T>,
    f: F,
    spec: &QuadratureSpec<T>,
) -> Result<QuadratureResult<T>> {
    if spec.a < T::zero() {
        return Err(Error::RadiusOutOfDomain(format!(
            "radial integration needs a >= 0, got {}",
            spec.a
        )));
    }
    // Panel samples are strictly interior, so rho > 0 whenever a >= 0.
    let g = |rho: T| -> T {
        match space.sphere_area(rho) {
            Ok(area) => f(rho) * area,
            Err(_) => T::nan(),
        }
    };
    integrate(g, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::MinkowskiNorm;
    use crate::special::unit_ball_volume;
    use approx::assert_relative_eq;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn flat(dim: usize) -> ModelSpace<f64> {
        ModelSpace::flat_minkowski(MinkowskiNorm::euclidean(dim).unwrap()).unwrap()
    }

    #[test]
    fn low_degree_polynomials_integrate_exactly() {
        let spec = QuadratureSpec::new(0.0, 1.0);
        let r = integrate(|x: f64| x.powi(5), &spec).unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.value, 1.0 / 6.0, max_relative = 1e-14);

        let spec = QuadratureSpec::new(-2.0, 3.0);
        let r = integrate(|x: f64| 3.0 * x * x + 2.0 * x + 1.0, &spec).unwrap();
        // Antiderivative x^3 + x^2 + x: (27 + 9 + 3) - (-8 + 4 - 2) = 45.
        assert_relative_eq!(r.value, 45.0, max_relative = 1e-14);
    }

    #[test]
    fn radial_inverse_fifth_power_matches_log_formula() {
        // On the flat 5-dimensional model, rho^{-5} * 5 omega_5 rho^4
        // integrates to 5 omega_5 ln(b/a).
        let space = flat(5);
        let spec = QuadratureSpec::new(0.01, 0.1);
        let r = integrate_radial(&space, |rho: f64| rho.powi(-5), &spec).unwrap();
        let expected = 5.0 * unit_ball_volume::<f64>(5) * 10.0f64.ln();
        assert!(r.converged);
        assert_relative_eq!(r.value, expected, max_relative = 1e-12);
    }

    #[test]
    fn logarithmic_singularity_stress() {
        // Integral of 1/x over [1e-8, 1] = ln(1e8), graded toward a.
        let mut spec = QuadratureSpec::new(1e-8, 1.0);
        spec.singular_a = true;
        let r = integrate(|x: f64| 1.0 / x, &spec).unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.value, 1e8f64.ln(), max_relative = 1e-11);
    }

    #[test]
    fn inverse_square_root_singularity() {
        let mut spec = QuadratureSpec::new(0.0, 1.0);
        spec.singular_a = true;
        let r = integrate(|x: f64| x.powf(-0.5), &spec).unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn ball_volumes_from_sphere_areas() {
        let space = flat(4);
        let spec = QuadratureSpec::new(0.0, 1.5);
        let r = integrate_radial(&space, |_| 1.0, &spec).unwrap();
        assert_relative_eq!(
            r.value,
            unit_ball_volume::<f64>(4) * 1.5f64.powi(4),
            max_relative = 1e-12
        );

        // Hyperbolic disc of radius R, c = -1: area 2 pi (cosh R - 1).
        let h2 = ModelSpace::<f64>::hyperbolic(2, -1.0).unwrap();
        let spec = QuadratureSpec::new(0.0, 2.0);
        let r = integrate_radial(&h2, |_| 1.0, &spec).unwrap();
        assert_relative_eq!(
            r.value,
            2.0 * PI * (2.0f64.cosh() - 1.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn breakpoints_capture_kinks_exactly() {
        let mut spec = QuadratureSpec::new(0.0, 1.0);
        spec.breakpoints = vec![0.3];
        let r = integrate(|x: f64| (x - 0.3).abs(), &spec).unwrap();
        // 0.3^2/2 + 0.7^2/2.
        assert!(r.converged);
        assert_relative_eq!(r.value, 0.29, max_relative = 1e-13);
        assert_eq!(
            r.subdivisions, 0,
            "panel edges at the kink need no refinement"
        );
    }

    #[test]
    fn tightening_the_tolerance_never_worsens_the_estimate() {
        let mut tols = vec![];
        let mut tol = 1e-4f64;
        while tol > 1e-12 {
            tols.push(tol);
            tol /= 2.0;
        }
        let mut last = f64::INFINITY;
        for tol in tols {
            let mut spec = QuadratureSpec::new(0.0, 1.0);
            spec.rel_tol = tol;
            spec.abs_tol = 0.0;
            spec.singular_a = true;
            let r = integrate(|x: f64| x.powf(-0.3) * (1.0 + x).ln(), &spec).unwrap();
            assert!(
                r.error_estimate <= last * (1.0 + 1e-12),
                "error estimate rose when tolerance tightened: {} -> {}",
                last,
                r.error_estimate
            );
            last = r.error_estimate;
        }
    }

    #[test]
    fn subdivision_cap_reports_non_convergence_without_error() {
        let mut spec = QuadratureSpec::new(1e-12, 1.0);
        spec.max_subdivisions = 1;
        spec.rel_tol = 1e-14;
        spec.abs_tol = 0.0;
        let r = integrate(|x: f64| 1.0 / x, &spec).unwrap();
        assert!(!r.converged);
        assert_eq!(r.subdivisions, 1);
    }

    #[test]
    fn non_finite_samples_abort() {
        let spec = QuadratureSpec::new(0.0, 1.0);
        let err = integrate(|x: f64| if x > 0.5 { f64::NAN } else { 1.0 }, &spec);
        assert!(matches!(
            err,
            Err(crate::error::Error::NonFiniteSample { .. })
        ));

        let err = integrate(|x: f64| 1.0 / (x - 0.5), &spec);
        assert!(err.is_err() || err.unwrap().value.is_finite());
    }

    #[test]
    fn invalid_intervals_are_rejected() {
        assert!(integrate(|x: f64| x, &QuadratureSpec::new(1.0, 0.0)).is_err());
        assert!(integrate(|x: f64| x, &QuadratureSpec::new(f64::NAN, 1.0)).is_err());
        let r = integrate(|x: f64| x, &QuadratureSpec::new(2.0, 2.0)).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.converged);

        let space = flat(3);
        assert!(integrate_radial(&space, |_| 1.0, &QuadratureSpec::new(-1.0, 1.0)).is_err());
    }

    #[test]
    fn results_are_bit_deterministic() {
        let mut spec = QuadratureSpec::new(0.0, 2.0);
        spec.singular_a = true;
        spec.breakpoints = vec![0.7, 1.3];
        let f = |x: f64| x.powf(-0.4) * (3.0 * x).sin().abs();
        let r1 = integrate(f, &spec).unwrap();
        let r2 = integrate(f, &spec).unwrap();
        assert_eq!(r1.value.to_bits(), r2.value.to_bits());
        assert_eq!(r1.error_estimate.to_bits(), r2.error_estimate.to_bits());
        assert_eq!(r1.subdivisions, r2.subdivisions);
    }

    proptest! {
        #[test]
        fn cubics_match_their_antiderivative(
            c0 in -3.0f64..3.0,
            c1 in -3.0f64..3.0,
            c2 in -3.0f64..3.0,
            c3 in -3.0f64..3.0,
            a in -2.0f64..0.0,
            w in 0.1f64..3.0,
        ) {
            let b = a + w;
            let f = |x: f64| c0 + x * (c1 + x * (c2 + x * c3));
            let anti = |x: f64| {
                x * (c0 + x * (c1 / 2.0 + x * (c2 / 3.0 + x * c3 / 4.0)))
            };
            let r = integrate(f, &QuadratureSpec::new(a, b)).unwrap();
            let exact = anti(b) - anti(a);
            prop_assert!(r.converged);
            prop_assert!((r.value - exact).abs() <= 1e-10 * (1.0 + exact.abs()));
        }
    }
}
