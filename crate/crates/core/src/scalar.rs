//! Scalar types usable as cell weights.
//!
//! All weights, loads, cuts, volumes and modeled times are carried in a
//! single scalar type `W`. Floating point types are the everyday choice;
//! [`Ratio<i64>`] gives exact arithmetic for the oracle checks.

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, NumAssign, ToPrimitive};
use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

/// Field-like scalar used for every weight and derived quantity.
///
/// Division must be exact or correctly rounded, so plain integers are not
/// implementors: imbalance ratios such as 4/3 would truncate.
pub trait Weight:
    Copy
    + PartialOrd
    + Debug
    + Display
    + Num
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum
    + FromStr
    + Send
    + Sync
    + 'static
{
    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as weight")
    }

    /// Conversion used for configuration constants such as epsilon.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite configuration constant")
    }

    /// Measured wall-clock seconds, rounded to whole nanoseconds so that
    /// exact scalars keep a bounded denominator.
    fn from_seconds(secs: f64) -> Self {
        let nanos = (secs.max(0.0) * 1e9).round() as usize;
        Self::from_usize_exact(nanos) / Self::from_usize_exact(1_000_000_000)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Total order with incomparable values (NaN) treated as equal.
    fn cmp_total(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

macro_rules! impl_weight {
    ($($t:ty),*) => {
        $(impl Weight for $t {})*
    };
}

impl_weight!(f32, f64, Ratio<i64>, Ratio<i128>);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_division_is_exact() {
        let four = Ratio::<i64>::from_usize_exact(4);
        let three = Ratio::<i64>::from_usize_exact(3);
        assert_eq!(four / three * three, four);
    }

    #[test]
    fn seconds_are_quantized() {
        let t = Ratio::<i64>::from_seconds(0.123_456_789_4);
        assert_eq!(t, Ratio::new(123_456_789, 1_000_000_000));
        assert_eq!(f64::from_seconds(-1.0), 0.0);
    }

    #[test]
    fn max_min_helpers() {
        assert_eq!(2.0f64.max_of(3.0), 3.0);
        assert_eq!(2.0f32.min_of(3.0), 2.0);
        assert_eq!(1.0f64.cmp_total(&f64::NAN), Ordering::Equal);
    }
}
