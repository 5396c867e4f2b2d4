//! Floating-point abstraction shared by the numerical modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// Real scalar used by the window calculators, limit processes, quadrature
/// and fixed-point solvers. Implemented for `f32` and `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only if the target type cannot
    /// represent finite `f64` values, which does not happen for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("scalar conversion from f64")
    }

    #[inline]
    fn from_count(k: usize) -> Self {
        Self::from_usize(k).expect("scalar conversion from usize")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar conversion to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Probability weight for exact enumeration: either a float or an exact
/// rational.
pub trait Weight: Num + Clone + Debug + Send + Sync {
    fn from_count(k: u64) -> Self;
    fn to_f64_lossy(&self) -> f64;
}

impl Weight for f64 {
    fn from_count(k: u64) -> Self {
        k as f64
    }
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Weight for f32 {
    fn from_count(k: u64) -> Self {
        k as f32
    }
    fn to_f64_lossy(&self) -> f64 {
        f64::from(*self)
    }
}

impl Weight for Ratio<i128> {
    fn from_count(k: u64) -> Self {
        Ratio::from_integer(i128::from(k))
    }
    fn to_f64_lossy(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}
