//! Scalar abstraction for the numeric core.
//!
//! Every table and kernel in this crate is generic over [`Scalar`], so the
//! whole pipeline can run in `f32` or `f64`. The crate root exports concrete
//! `f64` aliases, which is what the I/O layer and the CLI use.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + NumAssign + FromPrimitive + ToPrimitive + Sum<Self> + fmt::Debug + fmt::Display + 'static
{
    /// Nearest representable value for an `f64` constant (weights, tolerances).
    fn from_f64_lossy(value: f64) -> Self {
        <Self as FromPrimitive>::from_f64(value).expect("f64 constant must convert")
    }

    /// Exact conversion from a small count (index sizes, frequencies).
    fn from_count(value: usize) -> Self {
        <Self as FromPrimitive>::from_usize(value).expect("count must convert")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    fn weighted<S: Scalar>(a: S, b: S) -> S {
        a * S::from_f64_lossy(0.25) + b * S::from_f64_lossy(0.75)
    }

    #[test]
    fn generic_arithmetic_works_for_both_widths() {
        assert_eq!(weighted(1.0_f64, 3.0_f64), 2.5);
        assert_eq!(weighted(1.0_f32, 3.0_f32), 2.5);
    }

    #[test]
    fn count_conversion_is_exact() {
        assert_eq!(f64::from_count(23), 23.0);
        assert_eq!(f32::from_count(5), 5.0);
    }
}
