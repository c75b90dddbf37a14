//! Scalar abstraction shared by the coefficient and statistics layers.
//!
//! The evaluation kernels in [`crate::lfunc`] are tuned for `f64` and stay
//! concrete; everything that is plain arithmetic on coefficients, weights or
//! samples is written against [`Real`] so it can be run in `f32` as well.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`; every literal in the crate goes through here.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn from_u64_lossy(n: u64) -> Self {
        Self::from_u64(n).expect("u64 representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite conversion")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e^{2πi·num/den}`, exact at multiples of a quarter turn.
pub fn root_of_unity<S: Real>(num: u64, den: u64) -> Complex<S> {
    let num = num % den;
    if (4 * num) % den == 0 {
        return match 4 * num / den {
            0 => Complex::new(S::one(), S::zero()),
            1 => Complex::new(S::zero(), S::one()),
            2 => Complex::new(-S::one(), S::zero()),
            _ => Complex::new(S::zero(), -S::one()),
        };
    }
    let theta = 2.0 * std::f64::consts::PI * (num as f64) / (den as f64);
    Complex::new(S::lit(theta.cos()), S::lit(theta.sin()))
}
