//! Spectral filter functions of control protocols.
//!
//! Convention: `F_t(omega) = |int_0^t eps(s) e^{i omega s} ds|^2 / (2 pi t)`, so
//! that `int F_t domega = int |eps|^2 ds / t`, which is one for unit-modulus
//! controls.

use std::io::Write;

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::num::{cst, f64_of, linear_fit, logspace, sinc, Real};
use crate::quad::gauss_legendre;

/// Control modulation family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlKind<T> {
    /// No control, `eps = 1`.
    Free,
    /// Ideal pi pulses at `t (2k - 1) / (2N)`, `k = 1..N`.
    Cpmg { n_pulses: usize },
    /// Off-resonant drive, `eps(s) = exp(i rabi s)`.
    ContinuousDrive { rabi: T },
    /// Boundary modulation `alpha0 sin^p(pi s / t)`, `p` in {0, 1, 2}.
    SinP { p: u8, alpha0: T },
}

/// A control modulation applied for `duration`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlProtocol<T> {
    pub kind: ControlKind<T>,
    pub duration: T,
}

impl<T: Real> ControlProtocol<T> {
    pub fn free(duration: T) -> Self {
        ControlProtocol { kind: ControlKind::Free, duration }
    }

    pub fn cpmg(n_pulses: usize, duration: T) -> Self {
        ControlProtocol { kind: ControlKind::Cpmg { n_pulses }, duration }
    }

    pub fn drive(rabi: T, duration: T) -> Self {
        ControlProtocol { kind: ControlKind::ContinuousDrive { rabi }, duration }
    }

    pub fn sin_p(p: u8, alpha0: T, duration: T) -> Self {
        ControlProtocol { kind: ControlKind::SinP { p, alpha0 }, duration }
    }

    /// Same protocol with a different duration.
    pub fn with_duration(&self, duration: T) -> Self {
        ControlProtocol { kind: self.kind, duration }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > T::zero()) || !self.duration.is_finite() {
            return Err(invalid("duration", format!("must be finite and > 0, got {}", self.duration)));
        }
        match self.kind {
            ControlKind::Cpmg { n_pulses: 0 } => Err(invalid("n_pulses", "CPMG needs at least one pulse")),
            ControlKind::ContinuousDrive { rabi } if !rabi.is_finite() => Err(invalid("rabi", "must be finite")),
            ControlKind::SinP { p, .. } if p > 2 => Err(invalid("p", format!("must be 0, 1 or 2, got {p}"))),
            ControlKind::SinP { alpha0, .. } if !(alpha0.abs() <= T::one()) => {
                Err(invalid("alpha0", format!("|alpha0| must be <= 1, got {alpha0}")))
            }
            _ => Ok(()),
        }
    }
}

/// Log-log fit of the cycle-averaged filter tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit<T> {
    /// `s` in `F ~ omega^-s`.
    pub exponent: T,
    /// Root-mean-square residual of the fit in natural-log units.
    pub rms_residual: T,
}

/// Filter function of a validated protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterFunction<T> {
    protocol: ControlProtocol<T>,
    /// Piecewise-constant sign structure `(start, end, sign)` for Free/CPMG.
    segments: Vec<(T, T, T)>,
    rule: Vec<(T, T)>,
}

/// Rejects invalid protocols and precomputes the pulse segments.
pub fn build_filter<T: Real>(protocol: ControlProtocol<T>) -> Result<FilterFunction<T>> {
    FilterFunction::new(protocol)
}

impl<T: Real> FilterFunction<T> {
    pub fn new(protocol: ControlProtocol<T>) -> Result<Self> {
        protocol.validate()?;
        let t = protocol.duration;
        let segments = match protocol.kind {
            ControlKind::Free => vec![(T::zero(), t, T::one())],
            ControlKind::Cpmg { n_pulses } => {
                let n = cst::<T>(n_pulses as f64);
                let mut edges = vec![T::zero()];
                edges.extend((1..=n_pulses).map(|k| t * cst::<T>((2 * k - 1) as f64) / (n + n)));
                edges.push(t);
                edges
                    .windows(2)
                    .enumerate()
                    .map(|(j, w)| (w[0], w[1], if j % 2 == 0 { T::one() } else { -T::one() }))
                    .collect()
            }
            _ => Vec::new(),
        };
        let rule = gauss_legendre(24).into_iter().map(|(x, w)| (cst(x), cst(w))).collect();
        Ok(FilterFunction { protocol, segments, rule })
    }

    pub fn protocol(&self) -> &ControlProtocol<T> {
        &self.protocol
    }

    pub fn duration(&self) -> T {
        self.protocol.duration
    }

    /// Frequency about which the filter is centred.
    pub fn center(&self) -> T {
        match self.protocol.kind {
            ControlKind::ContinuousDrive { rabi } => -rabi,
            _ => T::zero(),
        }
    }

    /// Period in omega of the fast oscillation of the filter.
    pub fn period(&self) -> T {
        let base = T::TAU() / self.duration();
        match self.protocol.kind {
            ControlKind::Cpmg { n_pulses } => base * cst((2 * n_pulses) as f64),
            _ => base,
        }
    }

    /// Sign segments of piecewise `+-1` controls (Free and CPMG).
    pub fn sign_segments(&self) -> Option<&[(T, T, T)]> {
        if self.segments.is_empty() {
            None
        } else {
            Some(&self.segments)
        }
    }

    /// `int F domega = int |eps|^2 ds / t`.
    pub fn total_weight(&self) -> T {
        match self.protocol.kind {
            ControlKind::SinP { p, alpha0 } => {
                let a2 = alpha0 * alpha0;
                match p {
                    0 => a2,
                    1 => a2 * cst(0.5),
                    _ => a2 * cst(0.375),
                }
            }
            _ => T::one(),
        }
    }

    /// Closed-form `F_t(omega)`. For `|omega - center| t > 1e9` returns the
    /// cycle-averaged tail value instead.
    pub fn evaluate(&self, omega: T) -> T {
        let t = self.duration();
        let u = omega - self.center();
        if (u * t).abs() > cst(1e9) {
            return self.tail_value(omega);
        }
        let norm = T::TAU() * t;
        match self.protocol.kind {
            ControlKind::Free | ControlKind::ContinuousDrive { .. } => {
                let s = sinc(u * t * cst(0.5));
                t * s * s / T::TAU()
            }
            ControlKind::Cpmg { .. } => {
                let mut acc = Complex::new(T::zero(), T::zero());
                for &(a, b, sign) in &self.segments {
                    let len = b - a;
                    let mid = (a + b) * cst(0.5);
                    let amp = sign * len * sinc(u * len * cst(0.5));
                    acc = acc + Complex::from_polar(amp, u * mid);
                }
                acc.norm_sqr() / norm
            }
            ControlKind::SinP { p, alpha0 } => alpha0 * alpha0 * sinp_amplitude_sqr(p, u.abs(), t) / norm,
        }
    }

    /// Direct evaluation of the defining integral by composite Gauss–Legendre.
    pub fn evaluate_numeric(&self, omega: T) -> T {
        let t = self.duration();
        let (freq, weight_fn): (T, Box<dyn Fn(T) -> T>) = match self.protocol.kind {
            ControlKind::ContinuousDrive { rabi } => (omega + rabi, Box::new(|_| T::one())),
            ControlKind::SinP { p, alpha0 } => {
                (omega, Box::new(move |s: T| alpha0 * (T::PI() * s / t).sin().powi(p as i32)))
            }
            _ => (omega, Box::new(|_| T::one())),
        };
        let pieces = match self.sign_segments() {
            Some(s) => s.to_vec(),
            None => vec![(T::zero(), t, T::one())],
        };
        let mut acc = Complex::new(T::zero(), T::zero());
        for (a, b, sign) in pieces {
            let len = b - a;
            let cycles = (freq.abs() * len / T::PI()).ceil().to_usize().unwrap_or(1);
            let m = cycles.max(4);
            let h = len / cst(m as f64);
            for k in 0..m {
                let lo = a + h * cst(k as f64);
                let c = lo + h * cst(0.5);
                for &(x, w) in &self.rule {
                    let s = c + x * h * cst(0.5);
                    let v = sign * weight_fn(s) * w * h * cst(0.5);
                    acc = acc + Complex::from_polar(v, freq * s);
                }
            }
        }
        acc.norm_sqr() / (T::TAU() * t)
    }

    /// Average of `F` over one fast oscillation at `omega`, in closed form.
    /// Diverges at the centre; meant for `|omega - center| >> 1/t`.
    pub fn tail_value(&self, omega: T) -> T {
        let t = self.duration();
        let u = omega - self.center();
        let norm = T::TAU() * t;
        let u2 = u * u;
        match self.protocol.kind {
            ControlKind::Free | ControlKind::ContinuousDrive { .. } => cst::<T>(2.0) / (norm * u2),
            ControlKind::Cpmg { n_pulses } => cst::<T>((4 * n_pulses + 2) as f64) / (norm * u2),
            ControlKind::SinP { p, alpha0 } => {
                let a2 = alpha0 * alpha0;
                match p {
                    0 => a2 * cst(2.0) / (norm * u2),
                    1 => {
                        let a = T::PI() / t;
                        let d = a * a - u2;
                        a2 * cst::<T>(2.0) * a * a / (d * d * norm)
                    }
                    _ => {
                        let b = T::TAU() / t;
                        let d = b * b - u2;
                        let b4 = b * b * b * b;
                        a2 * b4 / (cst::<T>(2.0) * u2 * d * d * norm)
                    }
                }
            }
        }
    }

    /// Exponent `s` of the cycle-averaged decay `F ~ omega^-s`, fitted on
    /// `[50 pi/t, 5000 pi/t]` beyond the filter centre.
    ///
    /// Returns [`Error::IllPosed`] when the log-log residual exceeds 0.02,
    /// i.e. the tail is not a power law.
    pub fn tail_exponent(&self) -> Result<TailFit<T>> {
        let t = self.duration();
        let lo = cst::<T>(50.0) * T::PI() / t;
        let grid = logspace(lo, lo * cst(100.0), 41);
        let window = self.period();
        let sub = (window * t / T::TAU()).round().to_usize().unwrap_or(1).max(1);
        let h = window / cst(sub as f64);
        let mut lx = Vec::with_capacity(grid.len());
        let mut ly = Vec::with_capacity(grid.len());
        for &w in &grid {
            let start = self.center() + w - window * cst(0.5);
            let mut acc = T::zero();
            for k in 0..sub {
                let c = start + h * (cst::<T>(k as f64) + cst(0.5));
                for &(x, wt) in &self.rule {
                    acc += wt * self.evaluate(c + x * h * cst(0.5));
                }
            }
            let avg = acc * cst(0.5) / cst(sub as f64);
            lx.push(w.ln());
            ly.push(avg.ln());
        }
        let (slope, intercept, _) = linear_fit(&lx, &ly);
        let ss: T = lx
            .iter()
            .zip(&ly)
            .map(|(x, y)| {
                let r = *y - (intercept + slope * *x);
                r * r
            })
            .sum();
        let rms = (ss / cst(lx.len() as f64)).sqrt();
        if !(rms <= cst(0.02)) {
            return Err(Error::IllPosed(format!(
                "filter tail is not a power law (log-log rms residual {})",
                f64_of(rms)
            )));
        }
        Ok(TailFit { exponent: -slope, rms_residual: rms })
    }

    /// Writes `omega F(omega)` rows for plotting.
    pub fn write_samples<W: Write>(&self, grid: &[T], mut out: W) -> Result<()> {
        writeln!(out, "# omega[rad/s] F[s]")?;
        for &w in grid {
            writeln!(out, "{:.12e} {:.12e}", f64_of(w), f64_of(self.evaluate(w)))?;
        }
        Ok(())
    }
}

/// `|int_0^t sin^p(pi s/t) e^{i w s} ds|^2` for `w >= 0`, written so that the
/// removable singularities at `w = pi/t` (p = 1) and `w = 2 pi/t` (p = 2)
/// cancel analytically.
fn sinp_amplitude_sqr<T: Real>(p: u8, w: T, t: T) -> T {
    let half = cst::<T>(0.5);
    match p {
        0 => {
            let s = sinc(w * t * half);
            t * t * s * s
        }
        1 => {
            let a = T::PI() / t;
            let s = sinc((w - a) * t * half);
            let d = w + a;
            a * a * t * t * s * s / (d * d)
        }
        _ => {
            let b = T::TAU() / t;
            let b4 = b * b * b * b;
            if w < b * half {
                let s = sinc(w * t * half);
                let d = b * b - w * w;
                t * t * cst::<T>(0.25) * s * s * b4 / (d * d)
            } else {
                let s = sinc((w - b) * t * half);
                let d = w * (w + b);
                t * t * cst::<T>(0.25) * s * s * b4 / (d * d)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn filter(p: ControlProtocol<f64>) -> FilterFunction<f64> {
        build_filter(p).unwrap()
    }

    #[test]
    fn free_filter_reference_points() {
        let t = 3.0;
        let f = filter(ControlProtocol::free(t));
        assert!((f.evaluate(0.0) - t / (2.0 * PI)).abs() < 1e-15);
        assert!(f.evaluate(2.0 * PI / t) < 1e-30);
    }

    #[test]
    fn cpmg_cancels_at_zero_frequency() {
        for n in 1..=16 {
            let f = filter(ControlProtocol::cpmg(n, 2.0));
            assert!(f.evaluate(0.0).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn cpmg_pulses_are_equidistant_and_interior() {
        let f = filter(ControlProtocol::cpmg(4, 8.0));
        let seg = f.sign_segments().unwrap();
        let pulses: Vec<f64> = seg.iter().skip(1).map(|s| s.0).collect();
        assert_eq!(pulses, vec![1.0, 3.0, 5.0, 7.0]);
        assert!(seg.iter().zip(seg.iter().skip(1)).all(|(a, b)| a.2 == -b.2));
    }

    #[test]
    fn drive_filter_is_a_translated_free_filter() {
        let f = filter(ControlProtocol::drive(4.0, 2.5));
        let free = filter(ControlProtocol::free(2.5));
        for w in [-7.0, -4.0, -1.3, 0.0, 2.0] {
            assert!((f.evaluate(w) - free.evaluate(w + 4.0)).abs() < 1e-15);
        }
        assert_eq!(f.center(), -4.0);
    }

    #[test]
    fn closed_forms_match_the_defining_integral() {
        let protocols = [
            ControlProtocol::free(1.7),
            ControlProtocol::cpmg(5, 1.7),
            ControlProtocol::drive(-3.0, 1.7),
            ControlProtocol::sin_p(0, 0.8, 1.7),
            ControlProtocol::sin_p(1, 0.8, 1.7),
            ControlProtocol::sin_p(2, 0.8, 1.7),
        ];
        for p in protocols {
            let f = filter(p);
            for k in 0..200 {
                let w = -40.0 + 0.4013 * k as f64;
                let (a, b) = (f.evaluate(w), f.evaluate_numeric(w));
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-6), "{p:?} at {w}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn sinp_is_continuous_through_removable_points() {
        let t = 2.0;
        for (p, w0) in [(1u8, PI / t), (2u8, 2.0 * PI / t)] {
            let f = filter(ControlProtocol::sin_p(p, 1.0, t));
            let centre = f.evaluate(w0);
            for d in [1e-12, 1e-9, 1e-6] {
                assert!((f.evaluate(w0 + d) - centre).abs() < 1e-6 * centre);
                assert!((f.evaluate(w0 - d) - centre).abs() < 1e-6 * centre);
            }
            assert!((centre - f.evaluate_numeric(w0)).abs() < 1e-10 * centre);
        }
    }

    #[test]
    fn invalid_protocols_are_rejected() {
        assert!(build_filter(ControlProtocol::free(0.0)).is_err());
        assert!(build_filter(ControlProtocol::free(-1.0)).is_err());
        assert!(build_filter(ControlProtocol::cpmg(0, 1.0)).is_err());
        assert!(build_filter(ControlProtocol::sin_p(3, 1.0, 1.0)).is_err());
        assert!(build_filter(ControlProtocol::sin_p(1, 1.5, 1.0)).is_err());
    }

    #[test]
    fn huge_arguments_return_the_tail_value() {
        let f = filter(ControlProtocol::cpmg(3, 1.0));
        let w = 2e9;
        assert_eq!(f.evaluate(w), f.tail_value(w));
    }

    #[test]
    fn tail_exponents() {
        let expect = [2.0, 4.0, 6.0];
        for p in 0..3u8 {
            let fit = filter(ControlProtocol::sin_p(p, 1.0, 1.0)).tail_exponent().unwrap();
            assert!((fit.exponent - expect[p as usize]).abs() < 0.05, "p = {p}: {fit:?}");
        }
        let free = filter(ControlProtocol::free(1.0)).tail_exponent().unwrap();
        assert!((free.exponent - 2.0).abs() < 0.05);
    }

    #[test]
    fn samples_are_written_with_a_header() {
        let f = filter(ControlProtocol::free(1.0));
        let mut buf = Vec::new();
        f.write_samples(&[0.0, 1.0], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# omega"));
        assert_eq!(text.lines().count(), 3);
    }
}
