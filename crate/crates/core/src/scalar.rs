//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Real floating-point type the solvers and bounds are written against.
///
/// Implemented for `f32` and `f64`. Tolerances quoted in the docs are for
/// `f64`; the `f32` instantiation scales them through [`Scalar::tol`].
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// `max(x, k * epsilon)`: an absolute tolerance that never drops below
    /// the precision of the type.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::lit(64.0) * Self::epsilon())
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Euclidean norm of a slice, scaled to avoid overflow and underflow.
pub fn norm2<T: Scalar>(v: &[T]) -> T {
    let scale = v.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    let s: T = v.iter().map(|&x| (x / scale) * (x / scale)).sum();
    scale * s.sqrt()
}

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[inline]
pub fn norm2_sq<T: Scalar>(v: &[T]) -> T {
    dot(v, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_norm_survives_extremes() {
        assert_eq!(norm2(&[3.0f64, 4.0]), 5.0);
        assert!((norm2(&[3e200f64, 4e200]) / 5e200 - 1.0).abs() < 1e-15);
        let tiny = norm2(&[3e-200f64, 4e-200]);
        assert!((tiny / 5e-200 - 1.0).abs() < 1e-15);
        assert_eq!(norm2::<f32>(&[]), 0.0);
    }

    #[test]
    fn tolerance_floor_tracks_precision() {
        assert_eq!(f64::tol(1e-10), 1e-10);
        assert!(f32::tol(1e-10) > 1e-6);
    }
}
