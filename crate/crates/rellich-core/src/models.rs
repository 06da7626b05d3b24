//! Rotationally symmetric model spaces: flat space carrying a Minkowski
//! norm, and Riemannian hyperbolic space of constant negative curvature.
//!
//! Everything downstream only touches the radial structure: the curvature
//! comparison coefficient ct(c, rho) appearing in the radial Laplacian
//! f'' + (n-1) ct(c, rho) f', the nonnegative remainder weight
//! rho * ct(c, rho) - 1 that quantifies the gain over the flat case, and
//! the area of the distance sphere which serves as the radial volume
//! element.
//!
//! Distance spheres in the flat Minkowski model are measured with the
//! Busemann-Hausdorff normalization, which makes their area equal to the
//! Euclidean value n omega_n rho^{n-1} for every norm in the catalog.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{MinkowskiNorm, NormDescriptor};
use crate::profiles::RadialProfile;
use crate::scalar::{real, real_from_usize, Real};
use crate::special::unit_ball_volume;

/// Below this value of x = sqrt(|c|) rho the remainder weight switches to
/// its Taylor series; the first omitted term is below 1e-18 relative.
const SERIES_THRESHOLD: f64 = 1e-2;

/// Curvature sector of a model space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelGeometry<T> {
    /// Curvature zero; distance comes from a Minkowski norm.
    Flat,
    /// Constant negative curvature; the metric is Riemannian.
    Hyperbolic { curvature: T },
}

/// A model space: dimension, norm, and curvature sector.
#[derive(Debug, Clone)]
pub struct ModelSpace<T> {
    dim: usize,
    norm: MinkowskiNorm<T>,
    geometry: ModelGeometry<T>,
}

/// Serializable description of a model space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelDescriptor {
    FlatMinkowski { norm: NormDescriptor },
    Hyperbolic { dim: usize, curvature: f64 },
}

impl ModelDescriptor {
    pub fn instantiate<T: Real>(&self) -> Result<ModelSpace<T>> {
        match self {
            ModelDescriptor::FlatMinkowski { norm } => {
                ModelSpace::flat_minkowski(norm.instantiate()?)
            }
            ModelDescriptor::Hyperbolic { dim, curvature } => {
                ModelSpace::hyperbolic(*dim, real(*curvature))
            }
        }
    }
}

/// Remainder weight rho * ct(c, rho) - 1 = x coth x - 1 with
/// x = sqrt(|c|) rho. Zero in the flat case, strictly positive for c < 0,
/// increasing in |c| and in rho. Requires rho > 0 and c <= 0.
pub fn remainder_weight<T: Real>(curvature: T, rho: T) -> T {
    if curvature == T::zero() {
        return T::zero();
    }
    let x = (-curvature).sqrt() * rho;
    let threshold = real::<T>(SERIES_THRESHOLD);
    if x <= threshold {
        // x coth x - 1 = x^2/3 - x^4/45 + 2 x^6/945 - ...
        let x2 = x * x;
        let c1 = T::one() / real::<T>(3.0);
        let c2 = -T::one() / real::<T>(45.0);
        let c3 = real::<T>(2.0) / real::<T>(945.0);
        x2 * (c1 + x2 * (c2 + x2 * c3))
    } else {
        x / x.tanh() - T::one()
    }
}

/// Comparison coefficient ct(c, rho): 1/rho when c = 0 and
/// sqrt(|c|) coth(sqrt(|c|) rho) when c < 0. Requires rho > 0, c <= 0.
pub fn comparison_ct<T: Real>(curvature: T, rho: T) -> T {
    (T::one() + remainder_weight(curvature, rho)) / rho
}

/// Elementary lower bound 3 x^2 / (pi^2 + x^2) <= x coth x - 1 with
/// x = sqrt(|c|) rho, used to certify positivity of remainder terms
/// without evaluating hyperbolic functions.
pub fn remainder_weight_lower_bound<T: Real>(curvature: T, rho: T) -> T {
    if curvature == T::zero() {
        return T::zero();
    }
    let x2 = -curvature * rho * rho;
    real::<T>(3.0) * x2 / (T::PI() * T::PI() + x2)
}

impl<T: Real> ModelSpace<T> {
    /// Flat model carrying the given Minkowski norm. Needs dim >= 2.
    pub fn flat_minkowski(norm: MinkowskiNorm<T>) -> Result<Self> {
        let dim = norm.dim();
        if dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "model spaces need dimension >= 2, got {dim}"
            )));
        }
        Ok(Self {
            dim,
            norm,
            geometry: ModelGeometry::Flat,
        })
    }

    /// Riemannian hyperbolic model of constant curvature c < 0.
    pub fn hyperbolic(dim: usize, curvature: T) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "model spaces need dimension >= 2, got {dim}"
            )));
        }
        if !(curvature < T::zero()) || !curvature.is_finite() {
            return Err(Error::InvalidArgument(
                "hyperbolic model needs finite curvature < 0 (use the flat model for c = 0)".into(),
            ));
        }
        Ok(Self {
            dim,
            norm: MinkowskiNorm::euclidean(dim)?,
            geometry: ModelGeometry::Hyperbolic { curvature },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm(&self) -> &MinkowskiNorm<T> {
        &self.norm
    }

    pub fn geometry(&self) -> &ModelGeometry<T> {
        &self.geometry
    }

    /// Curvature constant: 0 for the flat model, c < 0 for hyperbolic.
    pub fn curvature(&self) -> T {
        match self.geometry {
            ModelGeometry::Flat => T::zero(),
            ModelGeometry::Hyperbolic { curvature } => curvature,
        }
    }

    pub fn descriptor(&self) -> ModelDescriptor {
        match self.geometry {
            ModelGeometry::Flat => ModelDescriptor::FlatMinkowski {
                norm: self.norm.descriptor(),
            },
            ModelGeometry::Hyperbolic { curvature } => ModelDescriptor::Hyperbolic {
                dim: self.dim,
                curvature: curvature.to_f64().unwrap_or(f64::NAN),
            },
        }
    }

    /// Comparison coefficient at distance rho > 0.
    pub fn ct(&self, rho: T) -> T {
        comparison_ct(self.curvature(), rho)
    }

    /// Remainder weight at distance rho > 0.
    pub fn remainder(&self, rho: T) -> T {
        remainder_weight(self.curvature(), rho)
    }

    /// Area of the distance sphere of radius rho >= 0 (the radial volume
    /// element). Flat: n omega_n rho^{n-1} for every catalog norm under the
    /// Busemann-Hausdorff normalization. Hyperbolic:
    /// n omega_n (sinh(sqrt(|c|) rho)/sqrt(|c|))^{n-1}.
    pub fn sphere_area(&self, rho: T) -> Result<T> {
        if !(rho >= T::zero()) {
            return Err(Error::RadiusOutOfDomain(format!(
                "sphere radius must be >= 0, got {rho}"
            )));
        }
        let n = self.dim;
        let surface = real_from_usize::<T>(n) * unit_ball_volume::<T>(n);
        let warped = match self.geometry {
            ModelGeometry::Flat => rho,
            ModelGeometry::Hyperbolic { curvature } => {
                let k = (-curvature).sqrt();
                (k * rho).sinh() / k
            }
        };
        Ok(surface * warped.powi(n as i32 - 1))
    }

    /// Laplacian of the radial function u = f(rho) at distance rho > 0:
    /// f''(rho) + (n - 1) ct(c, rho) f'(rho).
    pub fn radial_laplacian(&self, profile: &impl RadialProfile<T>, rho: T) -> Result<T> {
        if !(rho > T::zero()) {
            return Err(Error::RadiusOutOfDomain(format!(
                "radial laplacian needs rho > 0, got {rho}"
            )));
        }
        let n_minus_1 = real_from_usize::<T>(self.dim - 1);
        Ok(profile.second_deriv(rho) + n_minus_1 * self.ct(rho) * profile.deriv(rho))
    }

    /// Dual norm of the differential of u = f(rho): equals |f'(rho)| for
    /// radial functions on both models.
    pub fn radial_gradient_norm(&self, profile: &impl RadialProfile<T>, rho: T) -> T {
        profile.deriv(rho).abs()
    }
}
