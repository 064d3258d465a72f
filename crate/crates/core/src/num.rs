//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn cst<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Lossy view of a scalar as `f64`, used for diagnostics and ordering keys.
#[inline]
pub fn f64_of<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `sin(x)/x`, exact at zero.
#[inline]
pub fn sinc<T: Real>(x: T) -> T {
    if x.abs() < cst(1e-4) {
        let x2 = x * x;
        T::one() - x2 / cst(6.0) + x2 * x2 / cst(120.0)
    } else {
        x.sin() / x
    }
}

/// Evenly spaced points from `start` to `stop` inclusive.
pub fn linspace<T: Real>(start: T, stop: T, points: usize) -> Vec<T> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / cst::<T>((points - 1) as f64);
            (0..points).map(|i| if i + 1 == points { stop } else { start + step * cst(i as f64) }).collect()
        }
    }
}

/// Logarithmically spaced points from `start` to `stop` inclusive (both positive).
pub fn logspace<T: Real>(start: T, stop: T, points: usize) -> Vec<T> {
    linspace(start.ln(), stop.ln(), points)
        .into_iter()
        .enumerate()
        .map(|(i, l)| match i {
            0 => start,
            _ if i + 1 == points => stop,
            _ => l.exp(),
        })
        .collect()
}

/// Ordinary least-squares line through `(x, y)`: returns `(slope, intercept, r_squared)`.
pub fn linear_fit<T: Real>(x: &[T], y: &[T]) -> (T, T, T) {
    let n = cst::<T>(x.len() as f64);
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    let mut syy = T::zero();
    for (&xi, &yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
        syy += (yi - my) * (yi - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > T::zero() { sxy * sxy / (sxx * syy) } else { T::one() };
    (slope, intercept, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_is_continuous_through_the_series_switch() {
        let below: f64 = sinc(0.999_999e-4);
        let above: f64 = sinc(1.000_001e-4);
        assert!((below - above).abs() < 1e-12);
        assert_eq!(sinc(0.0_f64), 1.0);
    }

    #[test]
    fn spaced_grids_hit_their_endpoints() {
        let l = logspace(1e-3_f64, 1e3, 7);
        assert_eq!(l[0], 1e-3);
        assert_eq!(l[6], 1e3);
        assert!((l[3] - 1.0).abs() < 1e-12);
        assert_eq!(linspace(0.0_f64, 1.0, 1), vec![0.0]);
    }

    #[test]
    fn fit_recovers_an_exact_line() {
        let x = [1.0_f64, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| -2.0 * v + 0.5).collect();
        let (s, c, r2) = linear_fit(&x, &y);
        assert!((s + 2.0).abs() < 1e-14 && (c - 0.5).abs() < 1e-14 && (r2 - 1.0).abs() < 1e-14);
    }
}
