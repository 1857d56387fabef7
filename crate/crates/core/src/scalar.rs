//! Floating point abstraction shared by the risk model and the statistics code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive};

/// Real scalar used for risk weights, fractions and summary statistics.
pub trait Scalar: Float + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Lossy conversion from an exact count ratio.
    fn from_ratio(r: Ratio<u64>) -> Self {
        let n = Self::from_u64(*r.numer()).unwrap_or_else(Self::nan);
        let d = Self::from_u64(*r.denom()).unwrap_or_else(Self::nan);
        n / d
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(Self::nan)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
