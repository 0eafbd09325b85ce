//! Special functions used by the thermal-sideband machinery: modified
//! Bessel functions of the first kind and associated Laguerre polynomials.

use crate::scalar::Real;

/// Arguments above this overflow `f64`; callers stay far below it.
const BESSEL_I_MAX_ARG: f64 = 700.0;

/// Modified Bessel function of the first kind, `I_m(x)`, integer order.
///
/// Evaluated by the ascending power series
/// `I_m(x) = sum_k (x/2)^(2k+m) / (k! (k+m)!)`
/// with term-ratio stopping at machine precision. Every term is positive,
/// so there is no cancellation at any argument; the series is used over the
/// whole supported range `0 <= x <= 700` (beyond which `I_0` overflows f64).
/// Negative orders use `I_{-m} = I_m`; negative arguments use
/// `I_m(-x) = (-1)^m I_m(x)`.
pub fn bessel_i<R: Real>(order: i32, x: R) -> R {
    let m = order.unsigned_abs() as usize;
    let neg = x < R::zero() && order % 2 != 0;
    let x = x.abs();
    debug_assert!(x.to_f64().unwrap_or(0.0) <= BESSEL_I_MAX_ARG);

    if x == R::zero() {
        let v = if m == 0 { R::one() } else { R::zero() };
        return if neg { -v } else { v };
    }

    let half_x = x / R::of(2.0);
    // leading term (x/2)^m / m!
    let mut term = R::one();
    for j in 1..=m {
        term = term * half_x / R::of_usize(j);
    }
    let mut sum = term;
    let q = half_x * half_x;
    let mut k = 0usize;
    loop {
        k += 1;
        term = term * q / (R::of_usize(k) * R::of_usize(k + m));
        sum = sum + term;
        if term <= sum * R::epsilon() || k > 10_000 {
            break;
        }
    }
    if neg {
        -sum
    } else {
        sum
    }
}

/// Associated Laguerre polynomial `L_n^k(x)` by the three-term recurrence.
pub fn laguerre<R: Real>(n: usize, k: usize, x: R) -> R {
    let kr = R::of_usize(k);
    let mut prev = R::one(); // L_0^k
    if n == 0 {
        return prev;
    }
    let mut cur = R::one() + kr - x; // L_1^k
    for j in 1..n {
        let jr = R::of_usize(j);
        let next = ((R::of(2.0) * jr + R::one() + kr - x) * cur - (jr + kr) * prev)
            / (jr + R::one());
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bessel_small_order_reference_values() {
        // Reference values from Abramowitz & Stegun tables 9.8/9.11.
        assert_relative_eq!(bessel_i(0, 1.0_f64), 1.2660658777520084, max_relative = 1e-12);
        assert_relative_eq!(bessel_i(1, 1.0_f64), 0.5651591039924851, max_relative = 1e-12);
        assert_relative_eq!(bessel_i(0, 5.0_f64), 27.239871823604442, max_relative = 1e-12);
        assert_relative_eq!(bessel_i(2, 2.0_f64), 0.6889484476987382, max_relative = 1e-12);
    }

    #[test]
    fn bessel_zero_argument() {
        assert_eq!(bessel_i(0, 0.0_f64), 1.0);
        assert_eq!(bessel_i(3, 0.0_f64), 0.0);
        assert_eq!(bessel_i(-2, 0.0_f64), 0.0);
    }

    #[test]
    fn bessel_negative_order_and_argument() {
        let x = 2.5_f64;
        assert_eq!(bessel_i(-3, x), bessel_i(3, x));
        assert_relative_eq!(bessel_i(1, -x), -bessel_i(1, x), max_relative = 1e-14);
        assert_relative_eq!(bessel_i(2, -x), bessel_i(2, x), max_relative = 1e-14);
    }

    #[test]
    fn bessel_generating_identity() {
        // e^x = I_0(x) + 2 sum_{m>=1} I_m(x)
        for &x in &[0.3_f64, 3.0, 12.0, 45.0] {
            let mut total = bessel_i(0, x);
            for m in 1..200 {
                total += 2.0 * bessel_i(m, x);
            }
            assert_relative_eq!(total, x.exp(), max_relative = 1e-12);
        }
    }

    #[test]
    fn bessel_large_argument_vs_exp_scale() {
        // I_0(50) from mpmath: 2.9325537838493457e20
        assert_relative_eq!(bessel_i(0, 50.0_f64), 2.9325537838493457e20, max_relative = 1e-11);
    }

    #[test]
    fn laguerre_low_orders() {
        // L_0 = 1, L_1^k = 1+k-x, L_2(x) = (x^2 - 4x + 2)/2
        let x = 0.7_f64;
        assert_eq!(laguerre(0, 0, x), 1.0);
        assert_relative_eq!(laguerre(1, 2, x), 3.0 - x, max_relative = 1e-14);
        assert_relative_eq!(
            laguerre(2, 0, x),
            (x * x - 4.0 * x + 2.0) / 2.0,
            max_relative = 1e-14
        );
        // L_n^k(0) = C(n+k, n)
        assert_relative_eq!(laguerre(3, 2, 0.0_f64), 10.0, max_relative = 1e-14);
    }
}
