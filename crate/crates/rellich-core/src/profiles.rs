//! Radial profiles: scalar functions f(rho) used to build test functions
//! u(x) = f(d(x)) for the inequality and integration-by-parts checks.
//!
//! Each profile reports its value and first two derivatives in closed form,
//! plus an optional support radius beyond which it vanishes identically.

use crate::scalar::{real, Real};

/// A twice-differentiable radial function of the distance rho >= 0.
pub trait RadialProfile<T> {
    fn value(&self, rho: T) -> T;
    fn deriv(&self, rho: T) -> T;
    fn second_deriv(&self, rho: T) -> T;
    /// Radius beyond which the profile is identically zero, if compactly
    /// supported.
    fn support_radius(&self) -> Option<T>;
}

impl<T: Real, P: RadialProfile<T> + ?Sized> RadialProfile<T> for &P {
    fn value(&self, rho: T) -> T {
        (**self).value(rho)
    }
    fn deriv(&self, rho: T) -> T {
        (**self).deriv(rho)
    }
    fn second_deriv(&self, rho: T) -> T {
        (**self).second_deriv(rho)
    }
    fn support_radius(&self) -> Option<T> {
        (**self).support_radius()
    }
}

/// f(rho) = (1 - (rho/R)^2)^4 on [0, R], zero outside. C^3 across rho = R.
#[derive(Debug, Clone, Copy)]
pub struct Bump<T> {
    pub radius: T,
}

impl<T: Real> RadialProfile<T> for Bump<T> {
    fn value(&self, rho: T) -> T {
        let s = rho / self.radius;
        if s >= T::one() {
            return T::zero();
        }
        (T::one() - s * s).powi(4)
    }

    fn deriv(&self, rho: T) -> T {
        let s = rho / self.radius;
        if s >= T::one() {
            return T::zero();
        }
        let w = T::one() - s * s;
        -real::<T>(8.0) * s * w.powi(3) / self.radius
    }

    fn second_deriv(&self, rho: T) -> T {
        let s = rho / self.radius;
        if s >= T::one() {
            return T::zero();
        }
        let w = T::one() - s * s;
        real::<T>(8.0) * w * w * (real::<T>(7.0) * s * s - T::one()) / (self.radius * self.radius)
    }

    fn support_radius(&self) -> Option<T> {
        Some(self.radius)
    }
}

/// f(rho) = rho^a. Unbounded support; used for exact annulus ratios.
#[derive(Debug, Clone, Copy)]
pub struct PurePower<T> {
    pub exponent: T,
}

impl<T: Real> RadialProfile<T> for PurePower<T> {
    fn value(&self, rho: T) -> T {
        rho.powf(self.exponent)
    }

    fn deriv(&self, rho: T) -> T {
        self.exponent * rho.powf(self.exponent - T::one())
    }

    fn second_deriv(&self, rho: T) -> T {
        self.exponent * (self.exponent - T::one()) * rho.powf(self.exponent - real::<T>(2.0))
    }

    fn support_radius(&self) -> Option<T> {
        None
    }
}

/// f(rho) = (1 - s^2)^3 (c0 + c1 s + c2 s^2 + c3 s^3) with s = rho / R,
/// zero outside [0, R]. The cubic factor lets callers draw varied C^2 test
/// functions; choose c1 = 0 when f'(0) = 0 is required.
#[derive(Debug, Clone)]
pub struct PolyBump<T> {
    pub radius: T,
    pub coeffs: [T; 4],
}

impl<T: Real> PolyBump<T> {
    fn poly(&self, s: T) -> (T, T, T) {
        let [c0, c1, c2, c3] = self.coeffs;
        let two = real::<T>(2.0);
        let three = real::<T>(3.0);
        let six = real::<T>(6.0);
        let p = c0 + s * (c1 + s * (c2 + s * c3));
        let dp = c1 + s * (two * c2 + s * three * c3);
        let ddp = two * c2 + six * c3 * s;
        (p, dp, ddp)
    }

    fn bump(&self, s: T) -> (T, T, T) {
        let w = T::one() - s * s;
        let b = w.powi(3);
        let db = -real::<T>(6.0) * s * w * w;
        let ddb = w * (real::<T>(30.0) * s * s - real::<T>(6.0));
        (b, db, ddb)
    }
}

impl<T: Real> RadialProfile<T> for PolyBump<T> {
    fn value(&self, rho: T) -> T {
        let s = rho / self.radius;
        if s >= T::one() {
            return T::zero();
        }
        let (b, _, _) = self.bump(s);
        let (p, _, _) = self.poly(s);
        b * p
    }

    fn deriv(&self, rho: T) -> T {
        let s = rho / self.radius;
        if s >= T::one() {
            return T::zero();
        }
        let (b, db, _) = self.bump(s);
        let (p, dp, _) = self.poly(s);
        (db * p + b * dp) / self.radius
    }

    fn second_deriv(&self, rho: T) -> T {
        let s = rho / self.radius;
        if s >= T::one() {
            return T::zero();
        }
        let (b, db, ddb) = self.bump(s);
        let (p, dp, ddp) = self.poly(s);
        (ddb * p + real::<T>(2.0) * db * dp + b * ddp) / (self.radius * self.radius)
    }

    fn support_radius(&self) -> Option<T> {
        Some(self.radius)
    }
}

/// Pointwise square of another profile: g = f^2, g' = 2 f f',
/// g'' = 2 f'^2 + 2 f f''.
#[derive(Debug, Clone, Copy)]
pub struct Squared<P>(pub P);

impl<T: Real, P: RadialProfile<T>> RadialProfile<T> for Squared<P> {
    fn value(&self, rho: T) -> T {
        let f = self.0.value(rho);
        f * f
    }

    fn deriv(&self, rho: T) -> T {
        real::<T>(2.0) * self.0.value(rho) * self.0.deriv(rho)
    }

    fn second_deriv(&self, rho: T) -> T {
        let f = self.0.value(rho);
        let df = self.0.deriv(rho);
        real::<T>(2.0) * (df * df + f * self.0.second_deriv(rho))
    }

    fn support_radius(&self) -> Option<T> {
        self.0.support_radius()
    }
}
