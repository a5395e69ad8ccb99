use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, MulAssign, SubAssign};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Element type of every matrix in the crate: `f32` for normal builds,
/// `f64` for gradient checks and verification.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + Sum
    + Default
    + Debug
    + Display
    + FromStr
    + Send
    + Sync
    + 'static
{
    const NAME: &'static str;

    /// Raw IEEE-754 bits, widened to 64 bits. Used for bitwise comparisons.
    fn to_bits_u64(self) -> u64;

    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize is representable as a float")
    }

    fn from_f64_lossy(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 converts to every float type")
    }
}

impl Scalar for f32 {
    const NAME: &'static str = "f32";

    fn to_bits_u64(self) -> u64 {
        u64::from(self.to_bits())
    }
}

impl Scalar for f64 {
    const NAME: &'static str = "f64";

    fn to_bits_u64(self) -> u64 {
        self.to_bits()
    }
}

/// True when both slices have the same length and identical bit patterns.
pub fn bitwise_eq<T: Scalar>(a: &[T], b: &[T]) -> bool {
    first_bit_difference(a, b).is_none()
}

/// Index of the first element whose bits differ (or the shorter length on a length mismatch).
pub fn first_bit_difference<T: Scalar>(a: &[T], b: &[T]) -> Option<usize> {
    if a.len() != b.len() {
        return Some(a.len().min(b.len()));
    }
    a.iter().zip(b).position(|(x, y)| x.to_bits_u64() != y.to_bits_u64())
}
