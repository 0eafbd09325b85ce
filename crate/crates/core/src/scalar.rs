//! Scalar abstraction for the numerical kernels.
//!
//! All physics routines are generic over [`Real`] so they can run in `f32`
//! or `f64`; the crate-root aliases pin the default precision to `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + 'static
{
    /// Shorthand for lossy conversion from `f64` constants.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to any Real")
    }

    /// Lossy conversion from an integer count.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to any Real")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Convert an angle in degrees to radians.
pub fn deg_to_rad<R: Real>(deg: R) -> R {
    deg * R::PI() / R::of(180.0)
}

/// Convert an angle in radians to degrees.
pub fn rad_to_deg<R: Real>(rad: R) -> R {
    rad * R::of(180.0) / R::PI()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_round_trip() {
        let phi = 19.73_f64;
        assert!((rad_to_deg(deg_to_rad(phi)) - phi).abs() < 1e-12);
    }

    #[test]
    fn works_in_f32() {
        let phi = 45.0_f32;
        assert!((deg_to_rad(phi) - std::f32::consts::FRAC_PI_4).abs() < 1e-6);
    }
}
