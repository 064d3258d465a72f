//! Special functions not provided by the standard library.

use crate::num::{cst, Real};

/// Bessel function of the first kind of integer order, `J_n(x)`.
///
/// Uses Bessel's integral `J_n(x) = (1/pi) int_0^pi cos(n s - x sin s) ds`
/// with the trapezoidal rule, which converges geometrically for this
/// periodic analytic integrand once the node count exceeds `|x| + |n|`.
pub fn bessel_j<T: Real>(n: i32, x: T) -> T {
    if x == T::zero() {
        return if n == 0 { T::one() } else { T::zero() };
    }
    let m = 2 * (x.abs().to_f64().unwrap_or(0.0) as usize + n.unsigned_abs() as usize) + 64;
    let h = T::PI() / cst(m as f64);
    let nn = cst::<T>(n as f64);
    let mut sum = T::zero();
    for k in 0..=m {
        let s = h * cst(k as f64);
        let w = if k == 0 || k == m { cst(0.5) } else { T::one() };
        sum += w * (nn * s - x * s.sin()).cos();
    }
    sum * h / T::PI()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // Abramowitz & Stegun table 9.1.
        assert!((bessel_j(0, 1.0_f64) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 1.0_f64) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j(2, 5.0_f64) - 0.046_565_116_277_752_2).abs() < 1e-15);
        assert_eq!(bessel_j(0, 0.0_f64), 1.0);
        assert!(bessel_j(3, 0.0_f64).abs() < 1e-16);
    }

    #[test]
    fn sum_of_squares_is_one() {
        for x in [0.3_f64, 2.0, 7.5] {
            let s: f64 = (-60..=60).map(|n| bessel_j(n, x).powi(2)).sum();
            assert!((s - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn negative_order_reflection() {
        for n in 1..6 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((bessel_j(-n, 3.3_f64) - sign * bessel_j(n, 3.3)).abs() < 1e-14);
        }
    }
}
