//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar the curvature machinery is generic over.
///
/// Implemented for `f32` and `f64`. All tolerances in the crate are written
/// as `f64` literals and pass through [`Real::tol`], which clamps them to a
/// small multiple of the type's machine epsilon so that `f32` instantiations
/// do not ask for accuracy the format cannot deliver.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` constant into `Self` (rounding for `f32`).
    fn lit(x: f64) -> Self;

    /// Widens `self` to `f64`.
    fn as_f64(self) -> f64;

    /// A tolerance of `x`, but never tighter than 64 ulps at 1.0.
    #[inline]
    fn tol(x: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(x).max(floor)
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Largest absolute value in a slice, zero for an empty slice.
pub(crate) fn max_abs<T: Real>(xs: impl IntoIterator<Item = T>) -> T {
    xs.into_iter().fold(T::zero(), |m, x| m.max(x.abs()))
}
