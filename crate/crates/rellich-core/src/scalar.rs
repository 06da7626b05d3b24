//! Scalar abstraction for the numerical kernels.
//!
//! Everything in this crate is generic over a floating-point scalar so the
//! same code instantiates at `f32` and `f64`. The tolerance defaults shipped
//! with the crate are tuned for `f64`; `f32` users must relax them.

use core::fmt::{Debug, Display};
use core::iter::Sum;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar usable by every kernel in this crate.
///
/// Blanket-implemented for any type with the listed capabilities, which in
/// practice means `f32` and `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum<Self> + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + Sum<Self>
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` constant into the working scalar.
///
/// Panics only if the target type cannot represent ordinary finite `f64`
/// values, which no `Real` implementor of interest does.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant must convert into the working scalar")
}

/// Converts a dimension-like integer into the working scalar.
#[inline]
pub fn real_from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("usize must convert into the working scalar")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converts_constants_into_both_float_widths() {
        let a: f64 = real(0.25);
        let b: f32 = real(0.25);
        assert_eq!(a, 0.25);
        assert_eq!(b, 0.25);
        let n: f64 = real_from_usize(7);
        assert_eq!(n, 7.0);
    }
}
