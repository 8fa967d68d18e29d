//! Scalar abstraction shared by the metric and model code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real-valued scalar used for probabilities, weights and metric values.
///
/// Implemented for `f32` and `f64`. All numeric work in the models is written
/// against this trait; the crate root exposes `f64` aliases for everyday use.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal; never fails for `f32`/`f64`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal representable")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("real converts to f64")
    }
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + Serialize
        + DeserializeOwned
        + 'static
{
}

/// `n choose 2` as a scalar.
pub fn pairs<T: Real>(n: usize) -> T {
    if n < 2 {
        T::zero()
    } else {
        T::from_count(n) * T::from_count(n - 1) / T::lit(2.0)
    }
}

/// Round half up, as used for sample budgets.
pub fn round_half_up<T: Real>(x: T) -> usize {
    let r = (x + T::lit(0.5)).floor();
    r.to_usize().unwrap_or(0)
}
