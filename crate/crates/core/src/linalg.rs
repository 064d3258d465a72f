//! Small dense linear algebra: Cholesky factorization and nonnegative least squares.

use crate::error::{Error, Result};
use crate::num::{cst, Real};

/// Row-major square matrix stored as a flat vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Square<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Real> Square<T> {
    pub fn zeros(n: usize) -> Self {
        Square { n, data: vec![T::zero(); n * n] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    /// Gram matrix `A^T A` of a row-major `rows x n` matrix.
    pub fn gram(rows: &[Vec<T>], n: usize) -> Self {
        let mut g = Self::zeros(n);
        for row in rows {
            for i in 0..n {
                if row[i] == T::zero() {
                    continue;
                }
                for j in i..n {
                    g.data[i * n + j] += row[i] * row[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g.data[i * n + j] = g.data[j * n + i];
            }
        }
        g
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
/// Returns `None` if a pivot is not safely positive.
pub fn cholesky<T: Real>(a: &Square<T>) -> Option<Square<T>> {
    let n = a.n;
    let mut l = Square::zeros(n);
    let scale = (0..n).map(|i| a.get(i, i).abs()).fold(T::zero(), T::max);
    let tiny = scale * T::epsilon() * cst(16.0 * n.max(1) as f64);
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if !(d > tiny) {
            return None;
        }
        let d = d.sqrt();
        l.set(j, j, d);
        for i in j + 1..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / d);
        }
    }
    Some(l)
}

/// Solves `L L^T x = b` given the Cholesky factor `L`.
pub fn cholesky_solve<T: Real>(l: &Square<T>, b: &[T]) -> Vec<T> {
    let n = l.n;
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let v = l.get(i, k) * y[k];
            y[i] -= v;
        }
        y[i] /= l.get(i, i);
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            let v = l.get(k, i) * y[k];
            y[i] -= v;
        }
        y[i] /= l.get(i, i);
    }
    y
}

/// Lawson–Hanson active-set solver for `min |A x - b|^2 + lambda |x|^2`, `x >= 0`,
/// expressed through the normal equations `gram = A^T A`, `rhs = A^T b`.
///
/// With `lambda = 0` a singular passive subsystem is reported as
/// [`Error::RankDeficient`].
pub fn nnls_normal<T: Real>(gram: &Square<T>, rhs: &[T], lambda: T, equations: usize) -> Result<Vec<T>> {
    let n = gram.n;
    let mut x = vec![T::zero(); n];
    let mut passive = vec![false; n];
    let scale = (0..n).map(|i| gram.get(i, i)).fold(T::zero(), T::max).max(T::min_positive_value());
    let rhs_scale = rhs.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let tol = cst::<T>(1e3) * T::epsilon() * rhs_scale.max(scale);

    let gradient = |x: &[T]| -> Vec<T> {
        (0..n)
            .map(|i| {
                let mut w = rhs[i] - lambda * x[i];
                for j in 0..n {
                    w -= gram.get(i, j) * x[j];
                }
                w
            })
            .collect()
    };
    let solve_passive = |passive: &[bool]| -> Result<Vec<T>> {
        let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
        let mut sub = Square::zeros(idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                let mut v = gram.get(i, j);
                if a == b {
                    v += lambda;
                }
                sub.set(a, b, v);
            }
        }
        let l = cholesky(&sub).ok_or(Error::RankDeficient { unknowns: n, equations })?;
        let sol = cholesky_solve(&l, &idx.iter().map(|&i| rhs[i]).collect::<Vec<_>>());
        let mut s = vec![T::zero(); n];
        for (a, &i) in idx.iter().enumerate() {
            s[i] = sol[a];
        }
        Ok(s)
    };

    for _outer in 0..3 * n + 10 {
        let w = gradient(&x);
        let candidate = (0..n)
            .filter(|&i| !passive[i] && w[i] > tol)
            .max_by(|&a, &b| w[a].partial_cmp(&w[b]).unwrap_or(std::cmp::Ordering::Equal));
        let Some(j) = candidate else { return Ok(x) };
        passive[j] = true;
        for _inner in 0..3 * n + 10 {
            let s = solve_passive(&passive)?;
            if (0..n).all(|i| !passive[i] || s[i] > T::zero()) {
                x = s;
                break;
            }
            let mut alpha = T::one();
            for i in 0..n {
                if passive[i] && s[i] <= T::zero() {
                    let a = x[i] / (x[i] - s[i]);
                    if a < alpha {
                        alpha = a;
                    }
                }
            }
            for i in 0..n {
                let step = alpha * (s[i] - x[i]);
                x[i] += step;
                if passive[i] && x[i] <= tol / scale {
                    x[i] = T::zero();
                    passive[i] = false;
                }
            }
        }
    }
    Ok(x)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues<T: Real>(a: &Square<T>) -> Vec<T> {
    let n = a.n;
    let mut m = a.clone();
    for _ in 0..100 {
        let mut off = T::zero();
        let mut diag = T::zero();
        for i in 0..n {
            diag += m.get(i, i) * m.get(i, i);
            for j in 0..n {
                if i != j {
                    off += m.get(i, j) * m.get(i, j);
                }
            }
        }
        if off <= T::epsilon() * T::epsilon() * diag.max(T::min_positive_value()) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq == T::zero() {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (apq + apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m.get(k, p), m.get(k, q));
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let (mpk, mqk) = (m.get(p, k), m.get(q, k));
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| m.get(i, i)).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ev
}
