//! Scalar abstraction for utility and occupancy arithmetic.
//!
//! Everything the miner computes is a ratio of utilities, so any IEEE
//! float works. The crate-root aliases fix `f64`, which all documented
//! tolerances assume; `f32` remains available through the generic API.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar for utilities, occupancies and thresholds.
///
/// Blanket-implemented for anything with the listed bounds — in practice
/// `f32` and `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Display + Debug + FromStr + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Display + Debug + FromStr + Send + Sync + 'static
{
}

/// Lifts a count into the scalar domain. Exact in `f64` for any count a
/// database here could produce.
pub(crate) fn count<S: Scalar>(n: usize) -> S {
    S::from_usize(n).expect("count representable in scalar type")
}
