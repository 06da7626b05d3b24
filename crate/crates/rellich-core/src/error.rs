//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the numerical kernels.
///
/// Variants carry enough context to report a failure without re-running the
/// computation; none of them wrap I/O (the library performs none).
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A constructor or operation received an argument outside its domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Vector or matrix length does not match the declared dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A matrix required to be symmetric positive definite is not.
    #[error("matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    /// The Hessian of F^2/2 is singular at the queried direction
    /// (p-norms and quartic norms degenerate on the coordinate axes).
    #[error("fundamental tensor is degenerate at the queried direction (component {component} vanishes)")]
    DegenerateHessian { component: usize },

    /// An iterative solver stopped before reaching its tolerance.
    #[error("iteration did not converge: {context} (best residual {residual})")]
    NonConvergence { context: String, residual: f64 },

    /// An integrand sample came back NaN or infinite.
    #[error("non-finite integrand sample at rho = {rho}")]
    NonFiniteSample { rho: f64 },

    /// Inequality hypotheses on (n, alpha) are violated.
    #[error("hypothesis violation for {inequality}: {detail}")]
    HypothesisViolation { inequality: String, detail: String },

    /// A radial operation was evaluated at a radius outside its domain.
    #[error("radius out of domain: {0}")]
    RadiusOutOfDomain(String),

    /// A sweep or fit was asked to run on insufficient data.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
