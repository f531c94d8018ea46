//! Floating-point scalar abstraction.
//!
//! Everything numeric in this crate (generators, spectra, bases) is generic
//! over [`Real`], implemented for `f32` and `f64`. Exact quantities such as
//! the squared diagonal live in [`crate::rational`] instead.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// floating point: f32 or f64
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used for constants and tolerances.
    fn of(value: f64) -> Self {
        <Self as FromPrimitive>::from_f64(value).expect("f64 converts to every Real")
    }

    fn of_usize(value: usize) -> Self {
        <Self as FromPrimitive>::from_usize(value).expect("usize converts to every Real")
    }

    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("every Real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A complex scalar over `T`.
pub type ComplexScalar<T> = Complex<T>;

/// `e^{2πi·num/den}` with the fraction reduced modulo `den` before the
/// trigonometric evaluation, so large products `j·k` lose no phase.
pub fn unit_root<T: Real>(num: i64, den: usize) -> Complex<T> {
    let den_i = den as i64;
    let reduced = num.rem_euclid(den_i);
    // Exact values on the axes keep structured generators (±1, ±i) exact.
    if reduced == 0 {
        return Complex::new(T::one(), T::zero());
    }
    if 2 * reduced == den_i {
        return Complex::new(-T::one(), T::zero());
    }
    if 4 * reduced == den_i {
        return Complex::new(T::zero(), T::one());
    }
    if 4 * reduced == 3 * den_i {
        return Complex::new(T::zero(), -T::one());
    }
    let angle = 2.0 * std::f64::consts::PI * (reduced as f64) / (den as f64);
    Complex::new(T::of(angle.cos()), T::of(angle.sin()))
}

/// Whether every component of `z` is finite.
pub fn is_finite<T: Real>(z: &Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_root_axes_are_exact() {
        assert_eq!(unit_root::<f64>(1, 4), Complex::new(0.0, 1.0));
        assert_eq!(unit_root::<f64>(3, 4), Complex::new(0.0, -1.0));
        assert_eq!(unit_root::<f64>(-2, 4), Complex::new(-1.0, 0.0));
        assert_eq!(unit_root::<f32>(12, 6), Complex::new(1.0, 0.0));
    }

    #[test]
    fn unit_root_reduces_large_exponents() {
        let direct: Complex<f64> = unit_root(1, 7);
        let big: Complex<f64> = unit_root(1 + 7 * 1_000_003, 7);
        assert_eq!(direct, big);
        let third: Complex<f64> = unit_root(1, 3);
        assert!((third.re + 0.5).abs() < 1e-15);
        assert!((third.im - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }
}
