//! Scalar abstraction for the numeric core.
//!
//! Everything in this crate that does arithmetic is generic over [`Real`],
//! which is implemented for `f32` and `f64`. Concrete aliases for the common
//! `f64` lane live at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::Distribution;

/// Floating-point scalar the estimators are generic over.
///
/// Extends the `num-traits` float bundle with the sampling hooks the
/// simulation generators need, so generic code never has to spell out
/// distribution bounds.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Draw from the standard normal distribution.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draw from a gamma distribution with the given shape and scale.
    fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, scale: f64) -> Self;

    /// Draw uniformly from the half-open interval `[lo, hi)`.
    fn sample_uniform<R: Rng + ?Sized>(rng: &mut R, lo: Self, hi: Self) -> Self;

    /// Scale an `f64`-calibrated tolerance to this type's precision.
    ///
    /// Identity for `f64`; for `f32` the tolerance widens by the ratio of
    /// machine epsilons, so validation thresholds stay meaningful.
    fn scaled_tol(tol: f64) -> Self {
        c::<Self>(tol) * (Self::epsilon() / c::<Self>(f64::EPSILON))
    }
}

impl Real for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rand_distr::StandardNormal.sample(rng)
    }

    fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, scale: f64) -> Self {
        rand_distr::Gamma::new(shape, scale)
            .expect("valid gamma parameters")
            .sample(rng)
    }

    fn sample_uniform<R: Rng + ?Sized>(rng: &mut R, lo: Self, hi: Self) -> Self {
        rng.random_range(lo..hi)
    }
}

impl Real for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rand_distr::StandardNormal.sample(rng)
    }

    fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, scale: f64) -> Self {
        rand_distr::Gamma::new(shape as f32, scale as f32)
            .expect("valid gamma parameters")
            .sample(rng)
    }

    fn sample_uniform<R: Rng + ?Sized>(rng: &mut R, lo: Self, hi: Self) -> Self {
        rng.random_range(lo..hi)
    }
}

/// Convert an `f64` constant into the scalar type.
#[inline]
pub(crate) fn c<F: Real>(v: f64) -> F {
    F::from(v).expect("constant representable in scalar type")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_tol_is_identity_for_f64() {
        assert_eq!(f64::scaled_tol(1e-10), 1e-10);
    }

    #[test]
    fn scaled_tol_widens_for_f32() {
        let tol = f32::scaled_tol(1e-12);
        assert!(tol > 1e-5 && tol < 1e-2, "got {tol}");
    }
}
