//! Reversible Minkowski norms with exact derivative data.
//!
//! A Minkowski norm here is a positively 1-homogeneous, symmetric, strongly
//! convex function F on R^n: F(y) > 0 off the origin, F(t y) = |t| F(y), and
//! the Hessian of F^2/2 (the fundamental tensor) is positive definite away
//! from the directions where the catalog member is known to degenerate
//! (coordinate axes for p > 2 and quartic norms).
//!
//! The catalog keeps every derivative in closed form so that downstream
//! Legendre/polar computations can be validated against finite differences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::scalar::{real, real_from_usize, Real};
use crate::special::{gamma, unit_ball_volume};

/// Largest supported dimension (keeps Monte Carlo boxes and dense linear
/// algebra trivially cheap).
pub const MAX_DIM: usize = 16;

/// Anisotropic quadratic data: F(y) = sqrt(y^T A y) with A symmetric
/// positive definite.
#[derive(Debug, Clone)]
pub struct Anisotropic<T> {
    a: SquareMatrix<T>,
    a_inv: SquareMatrix<T>,
    sqrt_det: T,
}

impl<T: Real> Anisotropic<T> {
    /// Defining matrix A.
    pub fn matrix(&self) -> &SquareMatrix<T> {
        &self.a
    }

    /// Inverse of the defining matrix (the dual norm's matrix).
    pub fn a_inv(&self) -> &SquareMatrix<T> {
        &self.a_inv
    }
}

/// Catalog of norm families.
#[derive(Debug, Clone)]
pub enum NormKind<T> {
    /// F(y) = |y|_2.
    Euclidean,
    /// F(y) = sqrt(y^T A y), A symmetric positive definite.
    Anisotropic(Anisotropic<T>),
    /// F(y) = (sum |y_i|^p)^{1/p} with p >= 2.
    PNorm { p: T },
    /// F(y) = (sum w_i y_i^4)^{1/4} with w_i > 0. Ships without a closed-form
    /// dual so the variational dual path stays exercised.
    Quartic { weights: Vec<T> },
}

/// A reversible Minkowski norm on R^n.
#[derive(Debug, Clone)]
pub struct MinkowskiNorm<T> {
    dim: usize,
    kind: NormKind<T>,
}

/// Plain-data description of a norm, for configuration files and reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormDescriptor {
    Euclidean {
        dim: usize,
    },
    /// `matrix` is row-major with dim^2 entries.
    Anisotropic {
        dim: usize,
        matrix: Vec<f64>,
    },
    PNorm {
        dim: usize,
        p: f64,
    },
    Quartic {
        weights: Vec<f64>,
    },
}

/// Monte Carlo estimate with a one-sigma standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate<T> {
    pub value: T,
    pub std_error: T,
    pub samples: usize,
    pub seed: u64,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "dimension must be in 1..={MAX_DIM}, got {dim}"
        )));
    }
    Ok(())
}

impl<T: Real> MinkowskiNorm<T> {
    /// Euclidean norm on R^dim.
    pub fn euclidean(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            kind: NormKind::Euclidean,
        })
    }

    /// Anisotropic Euclidean norm sqrt(y^T A y); `a` must be symmetric
    /// positive definite.
    pub fn anisotropic(a: SquareMatrix<T>) -> Result<Self> {
        let dim = a.dim();
        check_dim(dim)?;
        if a.asymmetry() > real::<T>(1e-12) {
            return Err(Error::NotPositiveDefinite("matrix is not symmetric".into()));
        }
        let chol = a.cholesky()?;
        let a_inv = chol.inverse();
        let sqrt_det = chol.det().sqrt();
        Ok(Self {
            dim,
            kind: NormKind::Anisotropic(Anisotropic { a, a_inv, sqrt_det }),
        })
    }

    /// p-norm with p >= 2 (strong convexity fails off-axis for p < 2).
    pub fn p_norm(dim: usize, p: T) -> Result<Self> {
        check_dim(dim)?;
        if !(p >= real::<T>(2.0)) || !p.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "p must satisfy p >= 2, got {p}"
            )));
        }
        Ok(Self {
            dim,
            kind: NormKind::PNorm { p },
        })
    }

    /// Weighted quartic norm (sum w_i y_i^4)^{1/4} with positive weights.
    pub fn quartic(weights: Vec<T>) -> Result<Self> {
        let dim = weights.len();
        check_dim(dim)?;
        if weights.iter().any(|w| !(*w > T::zero()) || !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "quartic weights must be positive".into(),
            ));
        }
        Ok(Self {
            dim,
            kind: NormKind::Quartic { weights },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &NormKind<T> {
        &self.kind
    }

    fn check_len(&self, y: &[T]) -> Result<()> {
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: y.len(),
            });
        }
        Ok(())
    }

    /// F(y). Zero exactly at the origin.
    ///
    /// Panics if `y` has the wrong length (use the constructors' dimension).
    pub fn evaluate(&self, y: &[T]) -> T {
        assert_eq!(
            y.len(),
            self.dim,
            "norm evaluated on a vector of wrong length"
        );
        match &self.kind {
            NormKind::Euclidean => y.iter().map(|&v| v * v).sum::<T>().sqrt(),
            NormKind::Anisotropic(aniso) => {
                let ay = aniso.a.matvec(y);
                y.iter().zip(&ay).map(|(&u, &v)| u * v).sum::<T>().sqrt()
            }
            NormKind::PNorm { p } => {
                let m = y.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()));
                if m == T::zero() {
                    return T::zero();
                }
                let s: T = y.iter().map(|&v| (v.abs() / m).powf(*p)).sum();
                m * s.powf(T::one() / *p)
            }
            NormKind::Quartic { weights } => {
                let m = y.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()));
                if m == T::zero() {
                    return T::zero();
                }
                let s: T = y
                    .iter()
                    .zip(weights)
                    .map(|(&v, &w)| {
                        let u = v / m;
                        let u2 = u * u;
                        w * u2 * u2
                    })
                    .sum();
                m * s.sqrt().sqrt()
            }
        }
    }

    /// Legendre map J(y) = grad(F^2/2)(y), returned as a covector.
    ///
    /// Satisfies the Euler identity J(y)(y) = F(y)^2 and the positive
    /// 1-homogeneity J(t y) = t J(y).
    pub fn derivative(&self, y: &[T]) -> Result<Vec<T>> {
        self.check_len(y)?;
        if y.iter().all(|v| *v == T::zero()) {
            return Err(Error::InvalidArgument(
                "derivative requested at the origin".into(),
            ));
        }
        Ok(match &self.kind {
            NormKind::Euclidean => y.to_vec(),
            NormKind::Anisotropic(aniso) => aniso.a.matvec(y),
            NormKind::PNorm { p } => {
                let f = self.evaluate(y);
                let scale = f.powf(real::<T>(2.0) - *p);
                // |v|^{p-1} sgn(v) written as |v|^{p-2} v so v = 0 stays 0.
                y.iter()
                    .map(|&v| scale * v.abs().powf(*p - real::<T>(2.0)) * v)
                    .collect()
            }
            NormKind::Quartic { weights } => {
                let f = self.evaluate(y);
                let inv_f2 = T::one() / (f * f);
                y.iter()
                    .zip(weights)
                    .map(|(&v, &w)| inv_f2 * w * v * v * v)
                    .collect()
            }
        })
    }

    /// Fundamental tensor: the Hessian of F^2/2 at `y`.
    ///
    /// Errors with [`Error::DegenerateHessian`] on the directions where the
    /// catalog member is only positive semidefinite (coordinate hyperplanes
    /// for p > 2 and quartic norms) instead of returning a singular matrix.
    pub fn fundamental_tensor(&self, y: &[T]) -> Result<SquareMatrix<T>> {
        self.check_len(y)?;
        if y.iter().all(|v| *v == T::zero()) {
            return Err(Error::InvalidArgument(
                "fundamental tensor requested at the origin".into(),
            ));
        }
        match &self.kind {
            NormKind::Euclidean => Ok(SquareMatrix::identity(self.dim)),
            NormKind::Anisotropic(aniso) => Ok(aniso.a.clone()),
            NormKind::PNorm { p } => {
                let two = real::<T>(2.0);
                if *p > two {
                    if let Some(i) = y.iter().position(|v| *v == T::zero()) {
                        return Err(Error::DegenerateHessian { component: i });
                    }
                }
                let f = self.evaluate(y);
                let phi: Vec<T> = y.iter().map(|&v| v.abs().powf(*p - two) * v).collect();
                let c_outer = (two - *p) * f.powf(two - two * *p);
                let c_diag = (*p - T::one()) * f.powf(two - *p);
                let mut g = SquareMatrix::zeros(self.dim);
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        let mut v = c_outer * phi[i] * phi[j];
                        if i == j {
                            v = v + c_diag * y[i].abs().powf(*p - two);
                        }
                        g.set(i, j, v);
                    }
                }
                Ok(g)
            }
            NormKind::Quartic { weights } => {
                if let Some(i) = y.iter().position(|v| *v == T::zero()) {
                    return Err(Error::DegenerateHessian { component: i });
                }
                let f = self.evaluate(y);
                let f2 = f * f;
                let inv_f2 = T::one() / f2;
                let inv_f6 = inv_f2 * inv_f2 * inv_f2;
                let cubes: Vec<T> = y
                    .iter()
                    .zip(weights)
                    .map(|(&v, &w)| w * v * v * v)
                    .collect();
                let mut g = SquareMatrix::zeros(self.dim);
                let three = real::<T>(3.0);
                let minus_two = real::<T>(-2.0);
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        let mut v = minus_two * inv_f6 * cubes[i] * cubes[j];
                        if i == j {
                            v = v + three * inv_f2 * weights[i] * y[i] * y[i];
                        }
                        g.set(i, j, v);
                    }
                }
                Ok(g)
            }
        }
    }

    /// Exact volume of the unit ball {F <= 1} (Lebesgue measure).
    pub fn ball_volume(&self) -> T {
        match &self.kind {
            NormKind::Euclidean => unit_ball_volume(self.dim),
            NormKind::Anisotropic(aniso) => unit_ball_volume::<T>(self.dim) / aniso.sqrt_det,
            NormKind::PNorm { p } => p_ball_volume(self.dim, *p),
            NormKind::Quartic { weights } => {
                let base = p_ball_volume(self.dim, real::<T>(4.0));
                let quarter = real::<T>(0.25);
                let scale: T = weights
                    .iter()
                    .fold(T::one(), |acc, &w| acc * w.powf(quarter));
                base / scale
            }
        }
    }

    /// Busemann-Hausdorff density sigma_F = omega_n / Vol({F <= 1}).
    ///
    /// With this normalization the volume of a metric ball of radius rho in
    /// the flat model is omega_n rho^n for every catalog norm.
    pub fn sigma_f(&self) -> T {
        unit_ball_volume::<T>(self.dim) / self.ball_volume()
    }

    /// Monte Carlo cross-check of [`Self::sigma_f`] by rejection sampling in
    /// the tight axis-aligned bounding box of the unit ball.
    ///
    /// Requires at least 10^4 samples; the returned standard error is the
    /// one-sigma propagation of the binomial sampling error.
    pub fn sigma_f_monte_carlo(&self, samples: usize, seed: u64) -> Result<McEstimate<T>> {
        if samples < 10_000 {
            return Err(Error::InvalidArgument(format!(
                "need at least 10^4 Monte Carlo samples, got {samples}"
            )));
        }
        let half_widths: Vec<T> = (0..self.dim).map(|i| self.axis_extent(i)).collect();
        let box_volume: T = half_widths
            .iter()
            .fold(T::one(), |acc, &h| acc * real::<T>(2.0) * h);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0usize;
        let mut y = vec![T::zero(); self.dim];
        for _ in 0..samples {
            for (v, &h) in y.iter_mut().zip(&half_widths) {
                let u: f64 = rng.gen_range(-1.0..1.0);
                *v = real::<T>(u) * h;
            }
            if self.evaluate(&y) <= T::one() {
                hits += 1;
            }
        }
        let n = real_from_usize::<T>(samples);
        let p_hat = real_from_usize::<T>(hits) / n;
        let volume = box_volume * p_hat;
        let vol_err = box_volume * (p_hat * (T::one() - p_hat) / n).sqrt();
        let omega = unit_ball_volume::<T>(self.dim);
        let sigma = omega / volume;
        // d(sigma)/d(volume) = -omega / volume^2.
        let sigma_err = omega * vol_err / (volume * volume);
        Ok(McEstimate {
            value: sigma,
            std_error: sigma_err,
            samples,
            seed,
        })
    }

    /// Half-width of the unit ball along coordinate axis `i`,
    /// max { y_i : F(y) <= 1 } (the dual norm of the i-th coordinate
    /// covector, in closed form per catalog member).
    pub(crate) fn axis_extent(&self, i: usize) -> T {
        match &self.kind {
            NormKind::Euclidean | NormKind::PNorm { .. } => T::one(),
            NormKind::Anisotropic(aniso) => aniso.a_inv.get(i, i).sqrt(),
            NormKind::Quartic { weights } => T::one() / weights[i].powf(real::<T>(0.25)),
        }
    }

    pub(crate) fn anisotropic_data(&self) -> Option<&Anisotropic<T>> {
        match &self.kind {
            NormKind::Anisotropic(a) => Some(a),
            _ => None,
        }
    }

    /// Plain-data descriptor (f64) for serialization.
    pub fn descriptor(&self) -> NormDescriptor {
        match &self.kind {
            NormKind::Euclidean => NormDescriptor::Euclidean { dim: self.dim },
            NormKind::Anisotropic(aniso) => NormDescriptor::Anisotropic {
                dim: self.dim,
                matrix: aniso
                    .a
                    .as_slice()
                    .iter()
                    .map(|v| v.to_f64().unwrap())
                    .collect(),
            },
            NormKind::PNorm { p } => NormDescriptor::PNorm {
                dim: self.dim,
                p: p.to_f64().unwrap(),
            },
            NormKind::Quartic { weights } => NormDescriptor::Quartic {
                weights: weights.iter().map(|v| v.to_f64().unwrap()).collect(),
            },
        }
    }
}

impl NormDescriptor {
    /// Dimension of the described norm.
    pub fn dim(&self) -> usize {
        match self {
            NormDescriptor::Euclidean { dim }
            | NormDescriptor::Anisotropic { dim, .. }
            | NormDescriptor::PNorm { dim, .. } => *dim,
            NormDescriptor::Quartic { weights } => weights.len(),
        }
    }

    /// Builds the described norm at the working scalar type.
    pub fn instantiate<T: Real>(&self) -> Result<MinkowskiNorm<T>> {
        match self {
            NormDescriptor::Euclidean { dim } => MinkowskiNorm::euclidean(*dim),
            NormDescriptor::Anisotropic { dim, matrix } => {
                let data: Vec<T> = matrix.iter().map(|&v| real(v)).collect();
                MinkowskiNorm::anisotropic(SquareMatrix::from_row_major(*dim, data)?)
            }
            NormDescriptor::PNorm { dim, p } => MinkowskiNorm::p_norm(*dim, real(*p)),
            NormDescriptor::Quartic { weights } => {
                MinkowskiNorm::quartic(weights.iter().map(|&w| real(w)).collect())
            }
        }
    }
}

/// Lebesgue volume of the unit p-ball in n dimensions:
/// (2 Gamma(1 + 1/p))^n / Gamma(1 + n/p).
fn p_ball_volume<T: Real>(n: usize, p: T) -> T {
    let one_over_p = T::one() / p;
    let n_t = real_from_usize::<T>(n);
    let num = (real::<T>(2.0) * gamma(T::one() + one_over_p)).powf(n_t);
    num / gamma(T::one() + n_t * one_over_p)
}
