//! Scalar abstraction for probabilities and code lengths.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type used for model parameters and log-probabilities.
///
/// Implemented for `f32` and `f64`. The row tolerance is the slack allowed
/// when checking that a stored conditional distribution sums to one.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Allowed deviation of a stochastic row sum from one.
    fn row_tolerance() -> Self;

    fn from_f64_lossy(value: f64) -> Self {
        Self::from_f64(value).expect("finite conversion")
    }

    fn from_count(count: u64) -> Self {
        Self::from_u64(count).expect("count fits in a float")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }
}

impl Real for f64 {
    fn row_tolerance() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn row_tolerance() -> Self {
        1e-5
    }
}

/// `c * log2(c)` with the convention `0 log 0 = 0`.
#[inline]
pub(crate) fn xlog2x<T: Real>(c: u64) -> T {
    if c <= 1 {
        T::zero()
    } else {
        let x = T::from_count(c);
        x * x.log2()
    }
}
