//! Floating-point side: the multiplicative sum `K(x; ℓ, d)`, `L(1, χ)` for
//! cubic characters, the renormalized Euler products, the constants
//! `α_3, H_0, H_1, H_2, c(Heis_3)` and the cancellation probe.
//!
//! Numeric code is generic over [`Real`]; `f64` is what the crate uses.

use std::fmt::Debug;
use std::iter::Sum;

use num_traits::{Float, FloatConst};

pub mod alpha;
pub mod cancellation;
pub mod constants;
pub mod ksum;
pub mod lfunc;
pub mod ratio;

pub trait Real: Float + FloatConst + Sum + Debug + Send + Sync + 'static {}

impl<T: Float + FloatConst + Sum + Debug + Send + Sync + 'static> Real for T {}

#[inline]
pub(crate) fn lit<F: Real>(x: f64) -> F {
    F::from(x).expect("literal representable")
}

#[inline]
pub(crate) fn from_u64<F: Real>(x: u64) -> F {
    F::from(x).expect("integer representable")
}
