//! Floating-point abstraction so the numeric pipeline works at any precision.

use num_traits::{Float, FromPrimitive};

/// Scalar type the statistics and mining code is generic over.
///
/// Everything required is already provided by `f32` and `f64`; the bounds
/// exist so accumulators can convert counts and thread through rayon.
pub trait Scalar:
    Float + FromPrimitive + Send + Sync + std::fmt::Debug + std::fmt::Display + 'static
{
    /// Lossless-enough conversion from a row count. Counts in practice stay
    /// far below 2^24, so the f32 impl is exact for every realistic dataset.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
