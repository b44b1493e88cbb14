use num_traits::{Float, FromPrimitive, NumCast, NumOps, One, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::Neg;

/// Floating-point scalar accepted by the generic numeric routines.
pub trait Real: Float + FromPrimitive + NumCast + Debug + Send + Sync + 'static {
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 fits the scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Ordered field used where exact arithmetic is useful (Chebyshev linearization,
/// limit coefficients). Implemented by `f32`, `f64` and big rationals.
pub trait Field:
    Clone + PartialOrd + Zero + One + NumOps + Neg<Output = Self> + FromPrimitive + ToPrimitive + Debug
{
    fn int(k: i64) -> Self {
        Self::from_i64(k).expect("integer fits the field")
    }
}

impl<T> Field for T where
    T: Clone + PartialOrd + Zero + One + NumOps + Neg<Output = T> + FromPrimitive + ToPrimitive + Debug
{
}
