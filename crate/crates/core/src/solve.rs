//! Scalar root finding and one-dimensional maximization.

use crate::error::{Error, Result};
use crate::num::{cst, f64_of, Real};

/// Root of `f` on `[a, b]` by bisection with a secant acceleration
/// (Illinois variant of regula falsi). Requires a sign change.
pub fn find_root<T, F>(mut f: F, a: T, b: T, x_tol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Domain {
            quantity: "bracket",
            value: f64_of(a),
            reason: format!("no sign change on [{}, {}]", f64_of(a), f64_of(b)),
        });
    }
    let mut side = 0i8;
    for _ in 0..400 {
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a.min(b) && c < a.max(b) { c } else { (a + b) * cst(0.5) };
        let fc = f(c)?;
        if fc == T::zero() || (b - a).abs() <= x_tol {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= cst(0.5);
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= cst(0.5);
            }
            side = 1;
        }
        if (b - a).abs() <= x_tol {
            return Ok((a + b) * cst(0.5));
        }
    }
    Ok((a + b) * cst(0.5))
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
/// Returns `(argmax, max)`.
pub fn golden_max<T, F>(mut f: F, a: T, b: T, x_tol: T) -> Result<(T, T)>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let r = (cst::<T>(5.0).sqrt() - T::one()) * cst(0.5);
    let (mut a, mut b) = (a, b);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..300 {
        if (b - a).abs() <= x_tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc > fd { (c, fc) } else { (d, fd) })
}

/// Grid scan followed by golden-section refinement around the best grid
/// point. Returns `(argmax, max, best_index)`; `best_index` refers to `grid`.
pub fn scan_then_refine<T, F>(mut f: F, grid: &[T], x_tol: T) -> Result<(T, T, usize)>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let mut best = (0usize, T::neg_infinity());
    for (i, &x) in grid.iter().enumerate() {
        let v = f(x)?;
        if v > best.1 {
            best = (i, v);
        }
    }
    let i = best.0;
    if grid.len() < 3 {
        return Ok((grid[i], best.1, i));
    }
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    let (x, v) = golden_max(&mut f, lo, hi, x_tol)?;
    Ok(if v >= best.1 { (x, v, i) } else { (grid[i], best.1, i) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_of_cubic() {
        let r = find_root(|x: f64| Ok(x * x * x - 2.0), 0.0, 3.0, 1e-15).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn missing_sign_change_is_an_error() {
        assert!(find_root(|x: f64| Ok(x * x + 1.0), -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn golden_section_finds_a_smooth_peak() {
        let (x, v) = golden_max(|x: f64| Ok(-(x - 0.3).powi(2) + 2.0), -1.0, 1.0, 1e-12).unwrap();
        assert!((x - 0.3).abs() < 1e-6 && (v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn scan_handles_multimodal_grids() {
        let grid = crate::num::linspace(0.0_f64, 10.0, 201);
        let (x, _, _) = scan_then_refine(|x: f64| Ok(x.sin() * (-0.1 * x).exp()), &grid, 1e-10).unwrap();
        // First maximum of e^{-0.1x} sin x: tan x = 10.
        assert!((x - 10f64.atan()).abs() < 1e-6);
    }
}
