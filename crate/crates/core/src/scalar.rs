//! Scalar abstraction for all continuous quantities.
//!
//! Opinions are exact (`i8` values in {-1, +1}); everything continuous —
//! influence weights, distances, rewards, aggregates, centralities — is
//! generic over a floating-point scalar so the whole engine can run at `f32`
//! or `f64`. Concrete aliases for the common instantiations live at the
//! crate root.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum<Self>
    + fmt::Debug
    + fmt::Display
    + Default
    + serde::Serialize
    + serde::de::DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Conversion from configuration values, which are always parsed as `f64`.
    #[inline]
    fn from_config(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to any float scalar")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("float scalar converts to f64")
    }

    #[inline]
    fn half() -> Self {
        Self::from_config(0.5)
    }

    /// Exact conversion of an opinion entry (-1, 0 or +1).
    #[inline]
    fn from_opinion(v: i8) -> Self {
        Self::from_i8(v).expect("opinion entry converts exactly")
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + Sum<T>
        + fmt::Debug
        + fmt::Display
        + Default
        + serde::Serialize
        + serde::de::DeserializeOwned
        + Send
        + Sync
        + 'static
{
}
