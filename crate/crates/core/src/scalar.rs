//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All core math is generic over [`Real`], which is satisfied by `f32` and
//! `f64`. The concrete aliases exported from the crate root pin `f64`, which
//! is what the solvers are validated against; `f32` compiles and works but
//! the default tolerances in [`crate::tol`] assume double precision.

use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar usable for channel-capacity computations.
///
/// `nalgebra::RealField` supplies the transcendental functions and the dense
/// linear algebra (LU, SVD, Hermitian eigendecomposition); the num-traits
/// bounds allow lossless exchange with `f64` tolerance constants and error
/// diagnostics.
pub trait Real: nalgebra::RealField + Copy + FromPrimitive + ToPrimitive {}

impl<T> Real for T where T: nalgebra::RealField + Copy + FromPrimitive + ToPrimitive {}

/// Converts an `f64` literal (tolerances, constants) into `T`.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal must convert to the scalar type")
}

/// Converts a scalar to `f64` for diagnostics and reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Positive infinity in `T` (divergences with support violations).
#[inline]
pub fn infinity<T: Real>() -> T {
    real::<T>(f64::INFINITY)
}
