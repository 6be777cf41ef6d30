//! Scalar abstraction: every numerical routine in this crate is generic over
//! a floating-point type, so the same solver runs in `f32` or `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar used throughout the crate (`f32` or `f64`).
pub trait Float: num_traits::Float + num_traits::NumAssign + Sum + Debug + Display + 'static {}

impl<T> Float for T where
    T: num_traits::Float + num_traits::NumAssign + Sum + Debug + Display + 'static
{
}

/// Converts an `f64` constant into the working scalar type.
///
/// Panics only if the value is not representable at all (never the case for
/// the finite defaults used in this crate; infinities convert fine).
pub(crate) fn cast<F: Float>(x: f64) -> F {
    F::from(x).expect("f64 constant must convert to the scalar type")
}

/// Mathematical sign with `sign(0) = 0`.
///
/// Distinct from `num_traits::Float::signum`, which maps `+0.0` to `1.0` and
/// `-0.0` to `-1.0`; subgradient formulas need the zero case to vanish.
pub(crate) fn sign<F: Float>(x: F) -> F {
    if x > F::zero() {
        F::one()
    } else if x < F::zero() {
        -F::one()
    } else {
        F::zero()
    }
}
