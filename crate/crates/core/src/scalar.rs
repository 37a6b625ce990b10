use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar used by the measures and bound evaluators: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance on the total mass of a probability vector.
    fn sum_tolerance() -> Self {
        lit::<Self>(1e-12).max(Self::epsilon() * lit(64.0))
    }

    /// Absolute tolerance of the bisection searches on `[0, 1]`.
    fn bisection_tolerance() -> Self {
        lit::<Self>(1e-10).max(Self::epsilon() * lit(8.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub(crate) fn as_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
