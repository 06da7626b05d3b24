//! Numerical verification toolkit for sharp Hardy and Rellich inequalities
//! on flat Minkowski and hyperbolic model spaces.
//!
//! The crate is organized around a small pipeline:
//!
//! * [`norms`] — reversible Minkowski norms (Euclidean, anisotropic,
//!   p-norm, weighted quartic) with exact derivatives and fundamental
//!   tensors;
//! * [`duality`] — polar norms, Legendre transforms, and the deflection
//!   functional that detects non-Riemannian norms;
//! * [`models`] — flat and hyperbolic model spaces reduced to their radial
//!   structure (comparison coefficient, sphere area, radial Laplacian);
//! * [`quadrature`] — adaptive Gauss-Kronrod integration with endpoint
//!   grading and deterministic refinement;
//! * [`inequalities`] — the weighted Hardy, Rellich, and Hardy-Rellich
//!   inequalities with curvature remainder terms, their sharp constants,
//!   validity hypotheses, chain identities, and the integration-by-parts
//!   defect;
//! * [`sharpness`] — the near-extremal family, Rayleigh-ratio sweeps, and
//!   extrapolation of the sweep to its limit.
//!
//! Everything is generic over the scalar type through [`scalar::Real`]
//! (instantiable at `f32` or `f64`); the `*64` aliases below fix `f64`,
//! which is what the command-line tools and the acceptance tests use.

pub mod duality;
pub mod error;
pub mod inequalities;
pub mod matrix;
pub mod models;
pub mod norms;
pub mod profiles;
pub mod quadrature;
pub mod scalar;
pub mod sharpness;
pub mod special;

pub use error::{Error, Result};
pub use scalar::Real;

/// Crate version, embedded in generated reports for provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// f64 Minkowski norm.
pub type Norm64 = norms::MinkowskiNorm<f64>;
/// f64 model space.
pub type Model64 = models::ModelSpace<f64>;
/// f64 inequality evaluation report.
pub type Report64 = inequalities::InequalityReport<f64>;
/// f64 sharp-constant table.
pub type Constants64 = inequalities::Constants<f64>;
/// f64 sharpness sweep.
pub type Sweep64 = sharpness::SharpnessSweep<f64>;
/// f64 sweep configuration.
pub type SweepConfig64 = sharpness::SweepConfig<f64>;
/// f64 Riemannian-probe report.
pub type ProbeReport64 = duality::ProbeReport<f64>;
/// f64 quadrature request.
pub type QuadratureSpec64 = quadrature::QuadratureSpec<f64>;
