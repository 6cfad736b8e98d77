//! Standard normal density and distribution function.

use libm::{erfc, exp};

/// 1/√(2π)
pub const FRAC_1_SQRT_2PI: f64 = 0.3989422804014327;

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Standard normal density φ(u).
#[inline]
pub fn phi(u: f64) -> f64 {
    FRAC_1_SQRT_2PI * exp(-0.5 * u * u)
}

/// Standard normal distribution function Φ(u), via the complementary error
/// function so both tails keep full relative precision.
#[inline]
pub fn norm_cdf(u: f64) -> f64 {
    0.5 * erfc(-u * FRAC_1_SQRT_2)
}

/// Upper tail 1 − Φ(u).
#[inline]
pub fn norm_sf(u: f64) -> f64 {
    0.5 * erfc(u * FRAC_1_SQRT_2)
}
