//! Scalar abstraction shared by both backends.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the simulator is generic over: `f32` or `f64`.
///
/// Every tolerance in this crate is stated for `f64`; `f32` is supported by
/// the closed forms and the propagator but will not meet the tight
/// unitarity bounds.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Exact for `f64`, rounded for `f32`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count or order parameter.
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `n choose k`, zero when `k > n`.
pub fn binomial<T: Real>(n: u32, k: u32) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc = acc * f64::from(n - i) / f64::from(i + 1);
    }
    T::lit(acc.round())
}

/// `sqrt(n (n-1) ... (n-k+1))`, the matrix element of `a^k` on `|n>`.
pub fn sqrt_falling<T: Real>(n: usize, k: usize) -> T {
    debug_assert!(k <= n);
    let mut acc = T::one();
    for j in 0..k {
        acc = acc * T::count(n - j);
    }
    acc.sqrt()
}
