//! Scalar abstraction: every algorithm in this crate is generic over [`Real`],
//! which `f32` and `f64` implement. `f64` is the working precision the default
//! tolerances are stated for; `f32` trades accuracy for footprint.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar for signals, filters, and estimates.
///
/// The bound set is the union of what the numerics actually use: `Float` for
/// transcendentals, `FloatConst` for pi and friends, `FftNum` so transforms
/// run on the same scalar, and conversions for literals and diagnostics.
pub trait Real:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Sum<Self>
    + Display
    + LowerExp
    + Debug
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + NumAssign
        + FromPrimitive
        + ToPrimitive
        + FftNum
        + Sum<Self>
        + Display
        + LowerExp
        + Debug
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` constant into `T`, rounding once.
///
/// Constants are evaluated in `f64` and narrowed at the boundary, so an `f32`
/// instantiation sees the correctly rounded value instead of accumulated
/// single-precision error.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant converts to Real scalar")
}

/// Converts a sample count or index into `T`.
#[inline]
pub(crate) fn litn<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("usize converts to Real scalar")
}

/// Reads a scalar back out as `f64` for diagnostics and error payloads.
#[inline]
pub(crate) fn as_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
