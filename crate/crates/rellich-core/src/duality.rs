//! Polar (dual) norms, Legendre transforms, and the deflection functional
//! that separates Riemannian from genuinely Finslerian norms.
//!
//! For a Minkowski norm F the polar transform is
//! F*(xi) = sup_{y != 0} xi(y) / F(y), the Legendre map J = grad(F^2/2)
//! identifies vectors with covectors, and J* = J^{-1} = grad(F*^2/2).
//! Catalog norms with a closed-form dual evaluate it directly; everything
//! else goes through a deterministic variational maximizer (coarse
//! directional sampling plus simplex refinement plus, where the fundamental
//! tensor is available, Newton polish on J(y) = xi).
//!
//! The scalar deflection K_F(y, xi) = xi(y) - J(y)(J*(xi)) vanishes
//! identically exactly when the norm is induced by an inner product, which
//! is what `riemannian_probe` tests by seeded sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::{MinkowskiNorm, NormDescriptor, NormKind};
use crate::scalar::{real, real_from_usize, Real};

/// Relative tolerance on |K_F| / max |xi(y)| below which sampling calls a
/// norm Riemannian.
pub const PROBE_TOLERANCE_FACTOR: f64 = 1e-7;

/// Controls for the variational dual-norm maximizer.
#[derive(Debug, Clone)]
pub struct PolarOptions<T> {
    /// Coarse directions sampled per dimension (at least 64).
    pub directions_per_dim: usize,
    /// Relative tolerance on the maximized value.
    pub refine_rel_tol: T,
    /// Iteration cap for the simplex refinement.
    pub max_refine_iters: usize,
    /// Seed for the Gaussian coarse directions used when dim > 4.
    pub seed: u64,
}

impl<T: Real> Default for PolarOptions<T> {
    fn default() -> Self {
        Self {
            directions_per_dim: 64,
            refine_rel_tol: real(1e-10),
            max_refine_iters: 2_000,
            seed: 0x5EED_D0A1,
        }
    }
}

/// Result of a variational dual-norm evaluation.
#[derive(Debug, Clone)]
pub struct VariationalDual<T> {
    /// The maximized value xi(y) over the unit F-sphere, i.e. F*(xi).
    pub value: T,
    /// A maximizer with F(maximizer) = 1.
    pub maximizer: Vec<T>,
    /// Whether the refinement met its relative tolerance.
    pub converged: bool,
}

/// Outcome of the Riemannian sampling probe, serializable as a report row.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport<T> {
    pub norm: NormDescriptor,
    pub samples: usize,
    pub seed: u64,
    /// Largest |K_F| observed.
    pub max_abs_kf: T,
    /// Largest |xi(y)| observed (sets the relative scale).
    pub scale: T,
    /// True when max_abs_kf <= 1e-7 * scale.
    pub verdict: bool,
}

/// F*(xi). Uses the closed-form dual when the catalog provides one,
/// otherwise the variational maximizer with default options.
pub fn polar_transform<T: Real>(norm: &MinkowskiNorm<T>, xi: &[T]) -> Result<T> {
    check_len(norm, xi)?;
    if is_zero(xi) {
        return Ok(T::zero());
    }
    if let Some(value) = closed_polar(norm, xi) {
        return Ok(value);
    }
    Ok(polar_transform_numeric(norm, xi, &PolarOptions::default())?.value)
}

/// Variational evaluation of F*(xi), bypassing any closed-form dual.
///
/// Exposed so the closed forms and the maximizer can be checked against each
/// other; `polar_transform` prefers the closed form when it exists.
pub fn polar_transform_numeric<T: Real>(
    norm: &MinkowskiNorm<T>,
    xi: &[T],
    opts: &PolarOptions<T>,
) -> Result<VariationalDual<T>> {
    check_len(norm, xi)?;
    if is_zero(xi) {
        return Ok(VariationalDual {
            value: T::zero(),
            maximizer: vec![T::zero(); norm.dim()],
            converged: true,
        });
    }
    let f = |y: &[T]| norm.evaluate(y);
    let mut dual = maximize_over_unit_sphere(&f, norm.dim(), xi, opts);
    // Newton polish on J(y) = xi sharpens the maximizer wherever the
    // fundamental tensor is nondegenerate (axes stay on the simplex result).
    let y0: Vec<T> = dual.maximizer.iter().map(|&u| u * dual.value).collect();
    if let Some(y) = newton_polish(norm, xi, &y0) {
        let fy = norm.evaluate(&y);
        if fy > T::zero() {
            let value = dot(xi, &y) / fy;
            if value > dual.value {
                dual.value = value;
                dual.maximizer = y.iter().map(|&v| v / fy).collect();
            }
        }
    }
    Ok(dual)
}

/// Variational polar transform of an arbitrary norm-like function.
///
/// `f` must be positive off the origin and positively 1-homogeneous on the
/// scales probed. Used to take the polar of a polar (biduality checks).
pub fn numeric_polar_of<T: Real>(
    f: impl Fn(&[T]) -> T,
    dim: usize,
    xi: &[T],
    opts: &PolarOptions<T>,
) -> Result<VariationalDual<T>> {
    if xi.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: xi.len(),
        });
    }
    if is_zero(xi) {
        return Ok(VariationalDual {
            value: T::zero(),
            maximizer: vec![T::zero(); dim],
            converged: true,
        });
    }
    Ok(maximize_over_unit_sphere(&f, dim, xi, opts))
}

/// J*(xi) = grad(F*^2/2)(xi): the unique maximizer of y -> xi(y) - F(y)^2/2.
///
/// Output satisfies F(y) = F*(xi) and xi(y) = F(y) F*(xi). J*(0) = 0.
pub fn legendre_dual<T: Real>(norm: &MinkowskiNorm<T>, xi: &[T]) -> Result<Vec<T>> {
    check_len(norm, xi)?;
    if is_zero(xi) {
        return Ok(vec![T::zero(); norm.dim()]);
    }
    if let Some(y) = closed_legendre_dual(norm, xi) {
        return Ok(y);
    }
    let dual = polar_transform_numeric(norm, xi, &PolarOptions::default())?;
    Ok(dual.maximizer.iter().map(|&u| u * dual.value).collect())
}

/// Deflection K_F(y, xi) = xi(y) - J(y)(J*(xi)).
///
/// Identically zero iff the norm comes from an inner product; for such norms
/// J is linear and the two pairings coincide.
pub fn k_deflection<T: Real>(norm: &MinkowskiNorm<T>, y: &[T], xi: &[T]) -> Result<T> {
    check_len(norm, y)?;
    check_len(norm, xi)?;
    if is_zero(y) || is_zero(xi) {
        return Ok(T::zero());
    }
    let j_y = norm.derivative(y)?;
    let j_star_xi = legendre_dual(norm, xi)?;
    Ok(dot(xi, y) - dot(&j_y, &j_star_xi))
}

/// Samples `samples` seeded (y, xi) pairs in [-1,1]^n and reports whether
/// every deflection stays below `1e-7 * max |xi(y)|`.
pub fn riemannian_probe<T: Real>(
    norm: &MinkowskiNorm<T>,
    samples: usize,
    seed: u64,
) -> Result<ProbeReport<T>> {
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "probe needs at least one sample".into(),
        ));
    }
    let dim = norm.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_abs_kf = T::zero();
    let mut scale = T::zero();
    let draw = |rng: &mut ChaCha8Rng| -> Vec<T> {
        loop {
            let v: Vec<T> = (0..dim)
                .map(|_| real::<T>(rng.gen_range(-1.0..1.0)))
                .collect();
            if v.iter().any(|c| c.abs() > real::<T>(1e-3)) {
                return v;
            }
        }
    };
    for _ in 0..samples {
        let y = draw(&mut rng);
        let xi = draw(&mut rng);
        scale = scale.max(dot(&xi, &y).abs());
        max_abs_kf = max_abs_kf.max(k_deflection(norm, &y, &xi)?.abs());
    }
    let verdict = max_abs_kf <= real::<T>(PROBE_TOLERANCE_FACTOR) * scale;
    Ok(ProbeReport {
        norm: norm.descriptor(),
        samples,
        seed,
        max_abs_kf,
        scale,
        verdict,
    })
}

fn check_len<T: Real>(norm: &MinkowskiNorm<T>, v: &[T]) -> Result<()> {
    if v.len() != norm.dim() {
        return Err(Error::DimensionMismatch {
            expected: norm.dim(),
            got: v.len(),
        });
    }
    Ok(())
}

fn is_zero<T: Real>(v: &[T]) -> bool {
    v.iter().all(|c| *c == T::zero())
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&u, &v)| u * v).sum()
}

fn closed_polar<T: Real>(norm: &MinkowskiNorm<T>, xi: &[T]) -> Option<T> {
    match norm.kind() {
        NormKind::Euclidean => Some(dot(xi, xi).sqrt()),
        NormKind::Anisotropic(_) => {
            let a_inv_xi = norm.anisotropic_data()?.a_inv().matvec(xi);
            Some(dot(xi, &a_inv_xi).sqrt())
        }
        NormKind::PNorm { p } => {
            let q = *p / (*p - T::one());
            let m = xi.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()));
            if m == T::zero() {
                return Some(T::zero());
            }
            let s: T = xi.iter().map(|&v| (v.abs() / m).powf(q)).sum();
            Some(m * s.powf(T::one() / q))
        }
        NormKind::Quartic { .. } => None,
    }
}

fn closed_legendre_dual<T: Real>(norm: &MinkowskiNorm<T>, xi: &[T]) -> Option<Vec<T>> {
    match norm.kind() {
        NormKind::Euclidean => Some(xi.to_vec()),
        NormKind::Anisotropic(_) => Some(norm.anisotropic_data()?.a_inv().matvec(xi)),
        NormKind::PNorm { p } => {
            let q = *p / (*p - T::one());
            let f_star = closed_polar(norm, xi)?;
            let scale = f_star.powf(real::<T>(2.0) - q);
            // q - 1 > 0, so |v|^{q-1} sgn(v) sends v = 0 to 0 exactly.
            Some(
                xi.iter()
                    .map(|&v| scale * v.abs().powf(q - T::one()) * v.signum())
                    .collect(),
            )
        }
        NormKind::Quartic { .. } => None,
    }
}

/// Coarse sampling followed by Nelder-Mead refinement of
/// u -> xi(u) / F(u) over directions, returned on the unit F-sphere.
fn maximize_over_unit_sphere<T: Real>(
    f: &impl Fn(&[T]) -> T,
    dim: usize,
    xi: &[T],
    opts: &PolarOptions<T>,
) -> VariationalDual<T> {
    let h = |u: &[T]| -> T {
        let fu = f(u);
        if !(fu > T::zero()) || !fu.is_finite() {
            return T::neg_infinity();
        }
        dot(xi, u) / fu
    };
    // Coarse stage: catalog of directions plus the covector's own direction
    // and the coordinate axes, with the sign flipped to the favorable side.
    let mut best_u: Option<Vec<T>> = None;
    let mut best_h = T::neg_infinity();
    let mut consider = |u: Vec<T>| {
        let v = h(&u);
        let (v, u) = if v < T::zero() {
            (-v, u.iter().map(|&c| -c).collect())
        } else {
            (v, u)
        };
        if v > best_h {
            best_h = v;
            best_u = Some(u);
        }
    };
    for u in coarse_directions::<T>(dim, opts.directions_per_dim * dim, opts.seed) {
        consider(u);
    }
    for i in 0..dim {
        let mut e = vec![T::zero(); dim];
        e[i] = T::one();
        consider(e);
    }
    consider(xi.to_vec());
    let u0 = best_u.expect("coarse stage always yields a direction");
    let fu0 = f(&u0);
    let u0: Vec<T> = u0.iter().map(|&c| c / fu0).collect();

    if dim == 1 {
        return VariationalDual {
            value: h(&u0).max(T::zero()),
            maximizer: u0,
            converged: true,
        };
    }

    // Refinement: Nelder-Mead in an affine chart through u0 (coordinates on
    // the Euclidean orthogonal complement), objective xi(x)/F(x).
    let basis = orthonormal_complement(&u0);
    let m = dim - 1;
    let embed = |t: &[T]| -> Vec<T> {
        let mut x = u0.clone();
        for (k, &tk) in t.iter().enumerate() {
            for i in 0..dim {
                x[i] = x[i] + tk * basis[k][i];
            }
        }
        x
    };
    let obj = |t: &[T]| -> T { -h(&embed(t)) };

    let step = real::<T>(0.1);
    let mut simplex: Vec<Vec<T>> = Vec::with_capacity(m + 1);
    simplex.push(vec![T::zero(); m]);
    for k in 0..m {
        let mut t = vec![T::zero(); m];
        t[k] = step;
        simplex.push(t);
    }
    let mut values: Vec<T> = simplex.iter().map(|t| obj(t)).collect();

    let one = T::one();
    let two = real::<T>(2.0);
    let half = real::<T>(0.5);
    let mut converged = false;
    for _ in 0..opts.max_refine_iters {
        // Order simplex: index of best (lowest) and worst values.
        let mut order: Vec<usize> = (0..=m).collect();
        order.sort_by(|&a, &b| {
            values[a]
                .partial_cmp(&values[b])
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        let best = order[0];
        let worst = order[m];
        let second_worst = order[m - 1];
        let spread = values[worst] - values[best];
        let floor = values[best].abs().max(real::<T>(1e-30));
        if spread <= opts.refine_rel_tol * floor {
            converged = true;
            break;
        }
        // Centroid of all but the worst vertex.
        let mut centroid = vec![T::zero(); m];
        for (idx, t) in simplex.iter().enumerate() {
            if idx == worst {
                continue;
            }
            for k in 0..m {
                centroid[k] = centroid[k] + t[k];
            }
        }
        let inv = one / real_from_usize::<T>(m);
        for c in centroid.iter_mut() {
            *c = *c * inv;
        }
        let lerp = |a: &[T], b: &[T], t: T| -> Vec<T> {
            a.iter().zip(b).map(|(&x, &y)| x + t * (y - x)).collect()
        };
        // Reflect.
        let reflected = lerp(&centroid, &simplex[worst], -one);
        let fr = obj(&reflected);
        if fr < values[best] {
            // Expand.
            let expanded = lerp(&centroid, &simplex[worst], -two);
            let fe = obj(&expanded);
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            // Contract (outside if the reflection helped at all).
            let (point, fp) = if fr < values[worst] {
                let c = lerp(&centroid, &reflected, half);
                let fc = obj(&c);
                (c, fc)
            } else {
                let c = lerp(&centroid, &simplex[worst], half);
                let fc = obj(&c);
                (c, fc)
            };
            if fp < values[worst].min(fr) {
                simplex[worst] = point;
                values[worst] = fp;
            } else {
                // Shrink toward the best vertex.
                let anchor = simplex[best].clone();
                for idx in 0..=m {
                    if idx == best {
                        continue;
                    }
                    simplex[idx] = lerp(&anchor, &simplex[idx], half);
                    values[idx] = obj(&simplex[idx]);
                }
            }
        }
    }

    let (mut value, mut arg) = (T::neg_infinity(), 0usize);
    for (idx, v) in values.iter().enumerate() {
        if -*v > value {
            value = -*v;
            arg = idx;
        }
    }
    let x = embed(&simplex[arg]);
    let fx = f(&x);
    let maximizer: Vec<T> = x.iter().map(|&c| c / fx).collect();
    VariationalDual {
        value,
        maximizer,
        converged,
    }
}

/// Sample directions: a uniform angle sweep in 2-4 dimensions, seeded
/// Gaussian directions above.
fn coarse_directions<T: Real>(dim: usize, count: usize, seed: u64) -> Vec<Vec<T>> {
    match dim {
        0 => Vec::new(),
        1 => vec![vec![T::one()]],
        2 => {
            // Half circle; signs are handled by the caller.
            (0..count)
                .map(|k| {
                    let theta = T::PI() * real_from_usize::<T>(k) / real_from_usize::<T>(count);
                    vec![theta.cos(), theta.sin()]
                })
                .collect()
        }
        3 | 4 => {
            // Product angle grid with roughly `count` points.
            let angles = dim - 1;
            let per_axis = (count as f64).powf(1.0 / angles as f64).ceil() as usize;
            let mut out = Vec::new();
            let mut idx = vec![0usize; angles];
            loop {
                let mut u = vec![T::one(); dim];
                let mut sin_prod = T::one();
                for (a, &i) in idx.iter().enumerate() {
                    // Polar angles in [0, pi], final azimuth in [0, 2 pi).
                    let span = if a + 1 == angles {
                        real::<T>(2.0) * T::PI()
                    } else {
                        T::PI()
                    };
                    let phi = span * real_from_usize::<T>(i) / real_from_usize::<T>(per_axis);
                    u[a] = sin_prod * phi.cos();
                    sin_prod = sin_prod * phi.sin();
                }
                u[dim - 1] = sin_prod;
                out.push(u);
                // Increment the mixed-radix counter.
                let mut a = 0;
                loop {
                    idx[a] += 1;
                    if idx[a] < per_axis {
                        break;
                    }
                    idx[a] = 0;
                    a += 1;
                    if a == angles {
                        return out;
                    }
                }
            }
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let mut u: Vec<T> = (0..dim)
                        .map(|_| {
                            let g: f64 = rng.sample(StandardNormal);
                            real::<T>(g)
                        })
                        .collect();
                    let len = dot(&u, &u).sqrt();
                    if len > T::zero() {
                        for c in u.iter_mut() {
                            *c = *c / len;
                        }
                    } else {
                        u[0] = T::one();
                    }
                    u
                })
                .collect()
        }
    }
}

/// Euclidean orthonormal basis of the complement of `u` (Gram-Schmidt over
/// the coordinate axes, skipping the one most aligned with `u`).
fn orthonormal_complement<T: Real>(u: &[T]) -> Vec<Vec<T>> {
    let dim = u.len();
    let len = dot(u, u).sqrt();
    let unit: Vec<T> = u.iter().map(|&c| c / len).collect();
    let mut basis: Vec<Vec<T>> = vec![unit];
    for i in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = vec![T::zero(); dim];
        v[i] = T::one();
        for b in &basis {
            let proj = dot(&v, b);
            for (vc, &bc) in v.iter_mut().zip(b) {
                *vc = *vc - proj * bc;
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > real::<T>(1e-8) {
            basis.push(v.iter().map(|&c| c / norm).collect());
        }
    }
    basis.remove(0);
    basis
}

/// Newton iteration on J(y) = xi using the fundamental tensor; returns the
/// improved point, or None when the tensor is unavailable (degenerate
/// directions) or no progress is possible.
fn newton_polish<T: Real>(norm: &MinkowskiNorm<T>, xi: &[T], y0: &[T]) -> Option<Vec<T>> {
    let scale = xi.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()));
    let tol = real::<T>(1e-14) * scale;
    let residual = |y: &[T]| -> Option<Vec<T>> {
        let j = norm.derivative(y).ok()?;
        Some(xi.iter().zip(&j).map(|(&a, &b)| a - b).collect())
    };
    let inf = |r: &[T]| r.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()));

    let mut y = y0.to_vec();
    let mut r = residual(&y)?;
    let mut best = inf(&r);
    if !best.is_finite() {
        return None;
    }
    for _ in 0..20 {
        if best <= tol {
            break;
        }
        let g = norm.fundamental_tensor(&y).ok()?;
        let chol = g.cholesky().ok()?;
        let delta = chol.solve(&r);
        // Backtracking line search on the residual.
        let mut step = T::one();
        let mut improved = false;
        for _ in 0..6 {
            let candidate: Vec<T> = y.iter().zip(&delta).map(|(&a, &b)| a + step * b).collect();
            if let Some(rc) = residual(&candidate) {
                let nc = inf(&rc);
                if nc.is_finite() && nc < best {
                    y = candidate;
                    r = rc;
                    best = nc;
                    improved = true;
                    break;
                }
            }
            step = step * real::<T>(0.5);
        }
        if !improved {
            break;
        }
    }
    Some(y)
}
