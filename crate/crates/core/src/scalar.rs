//! Floating-point scalar abstraction.
//!
//! Every geometric routine in the crate is generic over [`Scalar`]. The trait
//! carries the per-precision tolerances so that the same code runs in `f32`
//! and `f64` without hard-coded epsilons.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative magnitude below which a homogeneous product is treated as zero.
    const ZERO_TOL: f64;
    /// Relative tolerance for incidence, collinearity and projective equality.
    const PROJ_TOL: f64;
    /// Significant decimal digits needed for a lossless text round trip.
    const ROUND_TRIP_DIGITS: usize;

    /// Converts an `f64` constant into this scalar type.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in scalar type")
    }

    #[inline]
    fn zero_tol() -> Self {
        Self::of(Self::ZERO_TOL)
    }

    #[inline]
    fn proj_tol() -> Self {
        Self::of(Self::PROJ_TOL)
    }

    #[inline]
    fn half() -> Self {
        Self::of(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::of(2.0)
    }

    /// Lossy conversion used for reports.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const ZERO_TOL: f64 = 1e-12;
    const PROJ_TOL: f64 = 1e-9;
    const ROUND_TRIP_DIGITS: usize = 17;
}

impl Scalar for f32 {
    const ZERO_TOL: f64 = 1e-6;
    const PROJ_TOL: f64 = 1e-4;
    const ROUND_TRIP_DIGITS: usize = 9;
}

/// Sign of `v` with a dead zone of half-width `tol`.
#[inline]
pub fn sign_with_tol<T: Scalar>(v: T, tol: T) -> i8 {
    if v > tol {
        1
    } else if v < -tol {
        -1
    } else {
        0
    }
}
