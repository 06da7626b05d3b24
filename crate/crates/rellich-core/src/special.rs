//! Special functions shared across modules: the Gamma function, unit-ball
//! volumes, and the polynomial smoothstep windows used to build C^2/C^3
//! cutoffs.

use crate::scalar::{real, real_from_usize, Real};

/// Lanczos coefficients (g = 7, 9 terms); relative accuracy ~1e-14 in f64.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for positive (and, via reflection, most negative) real
/// arguments, Lanczos approximation.
pub fn gamma<T: Real>(x: T) -> T {
    let half = real::<T>(0.5);
    if x < half {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
        let pi = T::PI();
        return pi / ((pi * x).sin() * gamma(T::one() - x));
    }
    let z = x - T::one();
    let mut acc = real::<T>(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + real::<T>(c) / (z + real_from_usize::<T>(i));
    }
    let g = real::<T>(7.5);
    let t = z + g;
    let sqrt_two_pi = (real::<T>(2.0) * T::PI()).sqrt();
    sqrt_two_pi * t.powf(z + half) * (-t).exp() * acc
}

/// Volume of the Euclidean unit ball in `n` dimensions,
/// omega_n = pi^{n/2} / Gamma(n/2 + 1).
///
/// Computed through the Gamma recursion omega_n = omega_{n-2} * 2 pi / n,
/// which is exact up to rounding for integer n (no Lanczos error enters).
pub fn unit_ball_volume<T: Real>(n: usize) -> T {
    let two_pi = real::<T>(2.0) * T::PI();
    let mut even = T::one(); // omega_0
    let mut odd = real::<T>(2.0); // omega_1
    if n == 0 {
        return even;
    }
    if n == 1 {
        return odd;
    }
    let mut value = T::zero();
    for k in 2..=n {
        let next = if k % 2 == 0 { even } else { odd } * two_pi / real_from_usize::<T>(k);
        if k % 2 == 0 {
            even = next;
        } else {
            odd = next;
        }
        value = next;
    }
    value
}

/// Quintic smoothstep 6t^5 - 15t^4 + 10t^3 on [0,1]: value, first and second
/// derivative vanish appropriately at both ends, giving a C^2 window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuinticStep;

/// Septic smoothstep 35t^4 - 84t^5 + 70t^6 - 20t^7 on [0,1]: one order
/// smoother (C^3). Used to check that results do not depend on the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SepticStep;

/// A polynomial window t in [0,1] -> [0,1] with enough end-flatness to build
/// C^2 cutoffs. `value(0)=0`, `value(1)=1`, derivatives vanish at both ends.
pub trait Smoothstep: Copy + core::fmt::Debug {
    fn value<T: Real>(self, t: T) -> T;
    fn deriv<T: Real>(self, t: T) -> T;
    fn second_deriv<T: Real>(self, t: T) -> T;
}

impl Smoothstep for QuinticStep {
    fn value<T: Real>(self, t: T) -> T {
        let (c10, c15, c6) = (real::<T>(10.0), real::<T>(15.0), real::<T>(6.0));
        t * t * t * (c10 - c15 * t + c6 * t * t)
    }

    fn deriv<T: Real>(self, t: T) -> T {
        // 30 t^2 (1 - t)^2
        let one_m = T::one() - t;
        real::<T>(30.0) * t * t * one_m * one_m
    }

    fn second_deriv<T: Real>(self, t: T) -> T {
        // 60 t (2t - 1)(t - 1)
        real::<T>(60.0) * t * (real::<T>(2.0) * t - T::one()) * (t - T::one())
    }
}

impl Smoothstep for SepticStep {
    fn value<T: Real>(self, t: T) -> T {
        let t4 = t * t * t * t;
        t4 * (real::<T>(35.0) - real::<T>(84.0) * t + real::<T>(70.0) * t * t
            - real::<T>(20.0) * t * t * t)
    }

    fn deriv<T: Real>(self, t: T) -> T {
        // 140 t^3 (1 - t)^3
        let one_m = T::one() - t;
        real::<T>(140.0) * t * t * t * one_m * one_m * one_m
    }

    fn second_deriv<T: Real>(self, t: T) -> T {
        // 420 t^2 (1 - t)^2 (1 - 2t)
        let one_m = T::one() - t;
        real::<T>(420.0) * t * t * one_m * one_m * (T::one() - real::<T>(2.0) * t)
    }
}
