//! Integer scalar abstraction used by the exact linear algebra layer.
//!
//! Everything in this crate is exact. The linear algebra routines are generic
//! over any signed integer ring implementing [`IntScalar`]; the solver itself
//! is instantiated with arbitrary precision integers through the aliases in
//! the crate root. Fixed width types (`i64`, `i128`) satisfy the trait too and
//! are handy for tests, but they are only exact as long as no intermediate
//! value overflows.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, NumRef, Signed, ToPrimitive};

/// A signed integer ring with exact division helpers.
pub trait IntScalar:
    Integer + Signed + NumRef + Clone + Hash + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn from_i64_exact(v: i64) -> Self {
        Self::from_i64(v).expect("scalar type cannot represent i64 value")
    }
}

impl<T> IntScalar for T where
    T: Integer
        + Signed
        + NumRef
        + Clone
        + Hash
        + Debug
        + Display
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

/// Rationals over an integer scalar, always kept in lowest terms.
pub type Rational<T> = Ratio<T>;

/// Greatest common divisor of a slice, zero for an all-zero or empty slice.
pub fn gcd_slice<T: IntScalar>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |acc, v| acc.gcd(v))
}

/// Least common multiple of the denominators of a rational slice.
pub fn denominator_lcm<T: IntScalar>(values: &[Ratio<T>]) -> T {
    values.iter().fold(T::one(), |acc, v| acc.lcm(v.denom()))
}

/// `true` iff every entry of the rational slice is an integer.
pub fn all_integral<T: IntScalar>(values: &[Ratio<T>]) -> bool {
    values.iter().all(|v| v.is_integer())
}
