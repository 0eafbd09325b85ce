//! Exact Clebsch-Gordan coefficients for integer angular momenta.
//!
//! Coefficients are evaluated from the Racah closed form with exact integer
//! factorials, so squared coefficients are exact rationals. No lookup tables.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

fn factorial(n: i64) -> BigInt {
    debug_assert!(n >= 0);
    (1..=n).map(BigInt::from).product()
}

/// A Clebsch-Gordan coefficient stored as its exact square and sign,
/// `cg = sign * sqrt(square)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactCg {
    sign: i8,
    square: BigRational,
}

impl ExactCg {
    fn zero() -> Self {
        ExactCg {
            sign: 0,
            square: BigRational::zero(),
        }
    }

    /// Exact squared coefficient.
    pub fn square(&self) -> &BigRational {
        &self.square
    }

    /// Sign of the coefficient: -1, 0, or +1.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.square.is_zero()
    }

    /// Floating-point value `sign * sqrt(square)`.
    pub fn value(&self) -> f64 {
        let sq = self.square.to_f64().expect("cg square fits in f64");
        f64::from(self.sign) * sq.sqrt()
    }
}

/// `<j1 m1; j2 m2 | j3 m3>` for integer angular momenta.
///
/// Selection-rule failures (triangle violations, `m3 != m1 + m2`,
/// out-of-range target projection) return an exact zero; arguments with
/// `|m1| > j1` or `|m2| > j2` are rejected as invalid.
pub fn clebsch_gordan(j1: u32, m1: i32, j2: u32, m2: i32, j3: u32, m3: i32) -> Result<ExactCg> {
    let (j1, m1) = (i64::from(j1), i64::from(m1));
    let (j2, m2) = (i64::from(j2), i64::from(m2));
    let (j3, m3) = (i64::from(j3), i64::from(m3));
    if m1.abs() > j1 || m2.abs() > j2 {
        return Err(Error::invalid(
            "clebsch-gordan",
            format!("projection out of range: |m|>j in ({j1},{m1}) or ({j2},{m2})"),
        ));
    }
    if m3 != m1 + m2 || m3.abs() > j3 {
        return Ok(ExactCg::zero());
    }
    // triangle condition
    if j3 > j1 + j2 || j3 < (j1 - j2).abs() {
        return Ok(ExactCg::zero());
    }

    // Racah closed form: cg = sqrt(prefactor) * series, with
    // prefactor = (2 j3 + 1) * delta(j1 j2 j3) * prod of projection factorials.
    let delta = BigRational::new(
        factorial(j1 + j2 - j3) * factorial(j1 - j2 + j3) * factorial(-j1 + j2 + j3),
        factorial(j1 + j2 + j3 + 1),
    );
    let proj = factorial(j1 + m1)
        * factorial(j1 - m1)
        * factorial(j2 + m2)
        * factorial(j2 - m2)
        * factorial(j3 + m3)
        * factorial(j3 - m3);
    let prefactor = BigRational::from(BigInt::from(2 * j3 + 1)) * delta * BigRational::from(proj);

    let k_min = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let k_max = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut series = BigRational::zero();
    for k in k_min..=k_max {
        let denom = factorial(k)
            * factorial(j1 + j2 - j3 - k)
            * factorial(j1 - m1 - k)
            * factorial(j2 + m2 - k)
            * factorial(j3 - j2 + m1 + k)
            * factorial(j3 - j1 - m2 + k);
        let term = BigRational::new(BigInt::from(if k % 2 == 0 { 1 } else { -1 }), denom);
        series += term;
    }
    if series.is_zero() {
        return Ok(ExactCg::zero());
    }
    let sign = if series.is_negative() { -1 } else { 1 };
    Ok(ExactCg {
        sign,
        square: prefactor * &series * &series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn cg_f64(j1: u32, m1: i32, j2: u32, m2: i32, j3: u32, m3: i32) -> f64 {
        clebsch_gordan(j1, m1, j2, m2, j3, m3).unwrap().value()
    }

    #[test]
    fn stretched_state_is_unity() {
        let cg = clebsch_gordan(4, 4, 1, 1, 5, 5).unwrap();
        assert_eq!(cg.square(), &BigRational::one());
        assert_eq!(cg.sign(), 1);
    }

    #[test]
    fn textbook_values() {
        // <1 1; 1 -1 | 0 0> = 1/sqrt(3), <1 0; 1 0 | 0 0> = -1/sqrt(3)
        assert!((cg_f64(1, 1, 1, -1, 0, 0) - (1.0 / 3.0_f64).sqrt()).abs() < 1e-14);
        assert!((cg_f64(1, 0, 1, 0, 0, 0) + (1.0 / 3.0_f64).sqrt()).abs() < 1e-14);
        // <2 2; 1 -1 | 3 1> = sqrt(1/15)
        assert!((cg_f64(2, 2, 1, -1, 3, 1) - (1.0 / 15.0_f64).sqrt()).abs() < 1e-14);
        // <1 1; 1 0 | 2 1> = 1/sqrt(2)
        assert!((cg_f64(1, 1, 1, 0, 2, 1) - 0.5_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn selection_rules_give_zero() {
        assert!(clebsch_gordan(4, 4, 1, 1, 4, 5).unwrap().is_zero());
        assert!(clebsch_gordan(1, 0, 1, 0, 3, 0).unwrap().is_zero());
        assert!(clebsch_gordan(2, 1, 1, 1, 3, 1).unwrap().is_zero());
    }

    #[test]
    fn invalid_projection_is_error() {
        assert!(clebsch_gordan(2, 3, 1, 0, 3, 3).is_err());
    }

    #[test]
    fn chiral_coupling_ratio_is_exactly_45() {
        let plus = clebsch_gordan(4, 4, 1, 1, 5, 5).unwrap();
        let minus = clebsch_gordan(4, 4, 1, -1, 5, 3).unwrap();
        let ratio = plus.square() / minus.square();
        assert_eq!(ratio, BigRational::from(BigInt::from(45)));
    }

    #[test]
    fn orthonormality_for_fixed_projections() {
        // sum over j3 of cg^2 at fixed (m1, m2) is exactly 1
        for m in -4..=4 {
            for q in -1..=1 {
                let mut total = BigRational::zero();
                for j3 in 3..=5 {
                    total += clebsch_gordan(4, m, 1, q, j3, m + q).unwrap().square();
                }
                assert_eq!(total, BigRational::one(), "m={m} q={q}");
            }
        }
    }
}
