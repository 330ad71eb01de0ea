//! Scalar abstraction shared by the simulators and the closed-form engine.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the simulators are generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    /// Conversion from an item count. Counts beyond 2^53 lose precision but stay finite.
    fn count(n: u64) -> Self {
        <Self as FromPrimitive>::from_u64(n).expect("count representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub(crate) fn c<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// `sin²(x)`
pub(crate) fn sin2<T: Real>(x: T) -> T {
    let s = x.sin();
    s * s
}

/// `cos²(x)`
pub(crate) fn cos2<T: Real>(x: T) -> T {
    let s = x.cos();
    s * s
}
