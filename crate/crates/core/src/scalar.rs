//! Scalar abstractions shared by the linear algebra layer.
//!
//! Everything in [`crate::linalg`] is written against [`Scalar`] (a commutative
//! ring with ordering) or [`Field`] (exact or approximate division). The
//! verification pipeline itself only ever instantiates the exact types; the
//! float impls exist for quick numeric cross-checks.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, Signed};

/// Ordered ring element usable by fraction-free elimination.
///
/// `Div` is only ever called where the quotient is exact (Bareiss steps), so
/// integer types are admissible here.
pub trait Scalar: Clone + Num + Signed + PartialOrd + Debug + Display + Send + Sync {
    fn from_i64(v: i64) -> Self;

    /// Whether arithmetic on this type is exact. Approximate types compare
    /// against zero with a tolerance in the few places it matters.
    fn is_exact() -> bool {
        true
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
}

/// A scalar with true division.
pub trait Field: Scalar {}

impl Scalar for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(BigInt::from(v))
    }
}

impl Field for BigRational {}

macro_rules! impl_float_scalar {
    ($f:ty, $eps:expr) => {
        impl Scalar for $f {
            fn from_i64(v: i64) -> Self {
                v as $f
            }

            fn is_exact() -> bool {
                false
            }

            fn is_negligible(&self) -> bool {
                self.abs() <= $eps
            }
        }

        impl Field for $f {}
    };
}

impl_float_scalar!(f32, 1e-4);
impl_float_scalar!(f64, 1e-9);

/// Sign of a scalar as -1, 0 or 1.
pub fn sign_of<T: Scalar>(v: &T) -> i8 {
    if v.is_negligible() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}
