//! Float helpers that resolve to `std` or `libm` depending on the build.

use num_traits::Float;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    Float::sqrt(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    Float::ln(x)
}

#[inline]
pub(crate) fn log2(x: f64) -> f64 {
    Float::log2(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    Float::abs(x)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    Float::hypot(x, y)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    Float::sin(x)
}

/// `-x log2 x` with the `0 log 0 = 0` convention.
#[inline]
pub(crate) fn xlog2x_neg(x: f64) -> f64 {
    if x > 0.0 {
        -x * log2(x)
    } else {
        0.0
    }
}
