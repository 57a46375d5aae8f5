//! Scalar abstraction: all numeric code is generic over [`Real`], which is
//! implemented for `f32` and `f64`.
//!
//! `f32` is the production lane (checkpoints store f32 arrays); `f64` is used
//! wherever finite-difference audits need the extra headroom.

use std::fmt::{Debug, Display};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + num_traits::NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn of(x: f64) -> Self;
    /// Lossy conversion to `f64`.
    fn as_f64(self) -> f64;
    /// Exact round-trip through the `f32` storage lane.
    fn from_f32_bits(x: f32) -> Self;
    /// Conversion to the `f32` storage lane.
    fn to_f32_bits(self) -> f32;
}

impl Real for f32 {
    #[inline(always)]
    fn of(x: f64) -> Self {
        x as f32
    }
    #[inline(always)]
    fn as_f64(self) -> f64 {
        self as f64
    }
    #[inline(always)]
    fn from_f32_bits(x: f32) -> Self {
        x
    }
    #[inline(always)]
    fn to_f32_bits(self) -> f32 {
        self
    }
}

impl Real for f64 {
    #[inline(always)]
    fn of(x: f64) -> Self {
        x
    }
    #[inline(always)]
    fn as_f64(self) -> f64 {
        self
    }
    #[inline(always)]
    fn from_f32_bits(x: f32) -> Self {
        x as f64
    }
    #[inline(always)]
    fn to_f32_bits(self) -> f32 {
        self as f32
    }
}
