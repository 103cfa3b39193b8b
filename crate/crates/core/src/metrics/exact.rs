//! Correctly rounded sums and weighted sums of `f64` values.
//!
//! Inputs are converted to exact rationals, combined without error and rounded
//! once. A mean of equal values is then that value, and a weighted sum whose
//! exact weights add up to one returns the common value unchanged.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub(crate) fn rational(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite value")
}

pub(crate) fn round(r: &BigRational) -> f64 {
    r.to_f64().expect("representable value")
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    let total = values.iter().fold(BigRational::zero(), |acc, v| acc + rational(*v));
    round(&(total / BigRational::from_integer(BigInt::from(values.len()))))
}

pub(crate) fn dot(weights: &[BigRational], values: &[f64]) -> f64 {
    let total = weights
        .iter()
        .zip(values)
        .fold(BigRational::zero(), |acc, (w, v)| acc + w * rational(*v));
    round(&total)
}
