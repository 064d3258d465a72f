//! Bath coupling spectra `G(omega)`, thermal occupancies and temperature-dressed
//! spectra `G_T(omega)`.
//!
//! Units: hbar = k_B = 1, frequencies and temperatures in rad/s.

use std::io::BufRead;

use crate::error::{domain, invalid, Error, Result};
use crate::num::{cst, f64_of, Real};

/// Anything that can be integrated against a filter function.
pub trait SpectralDensity<T: Real>: Sync {
    /// Spectral density at `omega`.
    fn density(&self, omega: T) -> Result<T>;

    /// Closed interval outside which the density vanishes; ends may be infinite.
    fn support(&self) -> (T, T);

    /// Frequencies where the density has kinks, edges or peaks.
    fn breakpoints(&self) -> Vec<T> {
        Vec::new()
    }

    /// Points with an integrable inverse-square-root singularity.
    fn singular_points(&self) -> Vec<T> {
        Vec::new()
    }

    /// Fails if integrals of the density against a bounded filter diverge.
    fn check_integrable(&self) -> Result<()> {
        Ok(())
    }
}

/// Interpolation rule for [`Tabulated`] spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    #[default]
    MonotoneCubic,
    Linear,
}

/// Sampled spectrum with a shape-preserving interpolant. Never extrapolates.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated<T> {
    omega: Vec<T>,
    value: Vec<T>,
    slope: Vec<T>,
    rule: Interpolation,
}

impl<T: Real> Tabulated<T> {
    pub fn new(omega: Vec<T>, value: Vec<T>, rule: Interpolation) -> Result<Self> {
        if omega.len() != value.len() {
            return Err(invalid("samples", "omega and G columns differ in length"));
        }
        if omega.len() < 2 {
            return Err(invalid("samples", "need at least two samples"));
        }
        if omega.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("samples", "omega must be strictly increasing"));
        }
        if let Some(v) = value.iter().find(|v| !(**v >= T::zero()) || !v.is_finite()) {
            return Err(invalid("samples", format!("G must be finite and nonnegative, got {v}")));
        }
        if omega.iter().any(|w| !w.is_finite()) {
            return Err(invalid("samples", "omega must be finite"));
        }
        let slope = match rule {
            Interpolation::Linear => Vec::new(),
            Interpolation::MonotoneCubic => limited_slopes(&omega, &value),
        };
        Ok(Tabulated { omega, value, slope, rule })
    }

    /// Samples `f` on `grid` and builds a monotone-cubic table.
    pub fn sample<F: Fn(T) -> Result<T>>(grid: &[T], f: F) -> Result<Self> {
        let value = grid.iter().map(|&w| f(w)).collect::<Result<Vec<_>>>()?;
        Self::new(grid.to_vec(), value, Interpolation::MonotoneCubic)
    }

    /// Parses two-column `omega G` text. Lines starting with `#` and blank
    /// lines are skipped; columns may be separated by whitespace or commas.
    pub fn from_reader<R: BufRead>(reader: R, rule: Interpolation) -> Result<Self> {
        let mut omega = Vec::new();
        let mut value = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let body = line.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> =
                body.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            if cols.len() != 2 {
                return Err(Error::Parse { line: i + 1, reason: format!("expected 2 columns, found {}", cols.len()) });
            }
            let parse =
                |s: &str| s.parse::<f64>().map_err(|e| Error::Parse { line: i + 1, reason: format!("`{s}`: {e}") });
            omega.push(cst(parse(cols[0])?));
            value.push(cst(parse(cols[1])?));
        }
        Self::new(omega, value, rule)
    }

    pub fn from_text(text: &str, rule: Interpolation) -> Result<Self> {
        Self::from_reader(text.as_bytes(), rule)
    }

    pub fn omega(&self) -> &[T] {
        &self.omega
    }

    pub fn values(&self) -> &[T] {
        &self.value
    }

    pub fn rule(&self) -> Interpolation {
        self.rule
    }

    pub fn support(&self) -> (T, T) {
        (self.omega[0], self.omega[self.omega.len() - 1])
    }

    pub fn evaluate(&self, w: T) -> Result<T> {
        let (lo, hi) = self.support();
        if !(w >= lo && w <= hi) {
            return Err(domain(
                "omega",
                f64_of(w),
                format!("outside tabulated support [{}, {}]", f64_of(lo), f64_of(hi)),
            ));
        }
        let k = match self.omega.partition_point(|x| *x <= w) {
            0 => 0,
            p => (p - 1).min(self.omega.len() - 2),
        };
        let (x0, x1) = (self.omega[k], self.omega[k + 1]);
        let (y0, y1) = (self.value[k], self.value[k + 1]);
        let h = x1 - x0;
        let s = (w - x0) / h;
        let v = match self.rule {
            Interpolation::Linear => y0 + (y1 - y0) * s,
            Interpolation::MonotoneCubic => {
                let s2 = s * s;
                let s3 = s2 * s;
                let two = cst::<T>(2.0);
                let three = cst::<T>(3.0);
                let h00 = two * s3 - three * s2 + T::one();
                let h10 = s3 - two * s2 + s;
                let h01 = three * s2 - two * s3;
                let h11 = s3 - s2;
                h00 * y0 + h10 * h * self.slope[k] + h01 * y1 + h11 * h * self.slope[k + 1]
            }
        };
        Ok(v.max(T::zero()))
    }

    /// One-sided derivative of the interpolant at the left end of the table.
    fn left_slope(&self) -> T {
        match self.rule {
            Interpolation::Linear => (self.value[1] - self.value[0]) / (self.omega[1] - self.omega[0]),
            Interpolation::MonotoneCubic => self.slope[0],
        }
    }
}

/// Node derivatives for the cubic Hermite interpolant: three-point estimates,
/// zero at local minima (keeps the curve nonnegative), Fritsch–Carlson limiting
/// inside monotone stretches.
fn limited_slopes<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    let secant: Vec<T> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / (x[k + 1] - x[k])).collect();
    let mut d = vec![T::zero(); n];
    if n == 2 {
        d[0] = secant[0];
        d[1] = secant[0];
        return d;
    }
    let three_point = |k: usize, a: usize, b: usize, c: usize| -> T {
        // Derivative at x[k] of the parabola through points a, b, c.
        let (xa, xb, xc) = (x[a], x[b], x[c]);
        let xk = x[k];
        y[a] * (two(xk) - xb - xc) / ((xa - xb) * (xa - xc))
            + y[b] * (two(xk) - xa - xc) / ((xb - xa) * (xb - xc))
            + y[c] * (two(xk) - xa - xb) / ((xc - xa) * (xc - xb))
    };
    fn two<T: Real>(v: T) -> T {
        v + v
    }
    d[0] = three_point(0, 0, 1, 2);
    d[n - 1] = three_point(n - 1, n - 3, n - 2, n - 1);
    for k in 1..n - 1 {
        d[k] = three_point(k, k - 1, k, k + 1);
    }
    for k in 1..n - 1 {
        if secant[k - 1] < T::zero() && secant[k] > T::zero() || y[k] == T::zero() {
            d[k] = T::zero();
        }
    }
    if y[0] == T::zero() && d[0] < T::zero() {
        d[0] = T::zero();
    }
    if y[n - 1] == T::zero() && d[n - 1] > T::zero() {
        d[n - 1] = T::zero();
    }
    let three = cst::<T>(3.0);
    for k in 0..n - 1 {
        let m = secant[k];
        if m == T::zero() {
            if y[k] == T::zero() || y[k + 1] == T::zero() {
                d[k] = T::zero();
                d[k + 1] = T::zero();
            }
            continue;
        }
        let a = d[k] / m;
        let b = d[k + 1] / m;
        if a < T::zero() && y[k] < y[k + 1] {
            d[k] = T::zero();
        }
        if b < T::zero() && y[k + 1] < y[k] {
            d[k + 1] = T::zero();
        }
        let r2 = a * a + b * b;
        if r2 > cst(9.0) {
            let tau = three / r2.sqrt();
            d[k] = tau * a * m;
            d[k + 1] = tau * b * m;
        }
    }
    d
}

/// A coupling spectral density `G(omega)`.
#[derive(Debug, Clone, PartialEq)]
pub enum BathSpectrum<T> {
    /// `g^2 tau_c / (pi (1 + omega^2 tau_c^2))`, symmetric.
    Lorentzian {
        g: T,
        tau_c: T,
    },
    /// `eta omega exp(-omega/omega_cut)` for `omega >= 0`.
    Ohmic {
        eta: T,
        omega_cut: T,
    },
    /// `amplitude omega^3` on `[0, cutoff]`.
    Blackbody {
        amplitude: T,
        cutoff: T,
    },
    /// Guided-mode density above a band edge: `(gamma_fs/2pi)/sqrt(omega/omega_co - 1)`
    /// for `omega > omega_co`, zero in the gap below.
    BandGap1D {
        omega_co: T,
        gamma_fs: T,
    },
    Tabulated(Tabulated<T>),
    /// `inner` restricted to `low <= |omega| <= high`.
    BandLimited {
        inner: Box<BathSpectrum<T>>,
        low: T,
        high: T,
    },
}

impl<T: Real> BathSpectrum<T> {
    pub fn lorentzian(g: T, tau_c: T) -> Result<Self> {
        let s = BathSpectrum::Lorentzian { g, tau_c };
        s.validate()?;
        Ok(s)
    }

    pub fn ohmic(eta: T, omega_cut: T) -> Result<Self> {
        let s = BathSpectrum::Ohmic { eta, omega_cut };
        s.validate()?;
        Ok(s)
    }

    pub fn blackbody(amplitude: T, cutoff: T) -> Result<Self> {
        let s = BathSpectrum::Blackbody { amplitude, cutoff };
        s.validate()?;
        Ok(s)
    }

    pub fn band_gap(omega_co: T, gamma_fs: T) -> Result<Self> {
        let s = BathSpectrum::BandGap1D { omega_co, gamma_fs };
        s.validate()?;
        Ok(s)
    }

    pub fn band_limited(inner: BathSpectrum<T>, low: T, high: T) -> Result<Self> {
        let s = BathSpectrum::BandLimited { inner: Box::new(inner), low, high };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |name, v: T| {
            if v >= T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite and >= 0, got {v}")))
            }
        };
        let positive = |name, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite and > 0, got {v}")))
            }
        };
        match self {
            BathSpectrum::Lorentzian { g, tau_c } => {
                nonneg("g", *g)?;
                positive("tau_c", *tau_c)
            }
            BathSpectrum::Ohmic { eta, omega_cut } => {
                nonneg("eta", *eta)?;
                positive("omega_cut", *omega_cut)
            }
            BathSpectrum::Blackbody { amplitude, cutoff } => {
                nonneg("amplitude", *amplitude)?;
                positive("cutoff", *cutoff)
            }
            BathSpectrum::BandGap1D { omega_co, gamma_fs } => {
                positive("omega_co", *omega_co)?;
                nonneg("gamma_fs", *gamma_fs)
            }
            BathSpectrum::Tabulated(_) => Ok(()),
            BathSpectrum::BandLimited { inner, low, high } => {
                nonneg("low", *low)?;
                if !(*high > *low) {
                    return Err(invalid("high", "band must satisfy high > low"));
                }
                inner.validate()
            }
        }
    }

    /// `G(omega)`. Only tabulated spectra reject queries outside their support.
    pub fn evaluate(&self, w: T) -> Result<T> {
        if w.is_nan() {
            return Err(domain("omega", f64::NAN, "not a number"));
        }
        Ok(match self {
            BathSpectrum::Lorentzian { g, tau_c } => {
                let x = w * *tau_c;
                *g * *g * *tau_c / (T::PI() * (T::one() + x * x))
            }
            BathSpectrum::Ohmic { eta, omega_cut } => {
                if w <= T::zero() {
                    T::zero()
                } else {
                    *eta * w * (-w / *omega_cut).exp()
                }
            }
            BathSpectrum::Blackbody { amplitude, cutoff } => {
                if w <= T::zero() || w > *cutoff {
                    T::zero()
                } else {
                    *amplitude * w * w * w
                }
            }
            BathSpectrum::BandGap1D { omega_co, gamma_fs } => {
                if w <= *omega_co {
                    T::zero()
                } else {
                    *gamma_fs / (T::TAU() * (w / *omega_co - T::one()).sqrt())
                }
            }
            BathSpectrum::Tabulated(t) => t.evaluate(w)?,
            BathSpectrum::BandLimited { inner, low, high } => {
                let a = w.abs();
                if a < *low || a > *high {
                    T::zero()
                } else {
                    inner.evaluate(w)?
                }
            }
        })
    }

    /// `(G(0+), dG/domega(0+))`, the data that fixes the thermal `omega -> 0` limit.
    pub fn zero_limit(&self) -> Result<(T, T)> {
        Ok(match self {
            BathSpectrum::Lorentzian { g, tau_c } => (*g * *g * *tau_c / T::PI(), T::zero()),
            BathSpectrum::Ohmic { eta, .. } => (T::zero(), *eta),
            BathSpectrum::Blackbody { .. } => (T::zero(), T::zero()),
            BathSpectrum::BandGap1D { .. } => (T::zero(), T::zero()),
            BathSpectrum::Tabulated(t) => {
                let (lo, hi) = t.support();
                if lo > T::zero() || hi <= T::zero() {
                    (T::zero(), T::zero())
                } else {
                    let v0 = t.evaluate(T::zero())?;
                    if lo == T::zero() {
                        (v0, t.left_slope())
                    } else {
                        // Interior zero: one-sided difference on the interpolant.
                        let h = (hi.min(T::one()) * cst(1e-7)).max(T::epsilon());
                        let slope = (t.evaluate(h)? - v0) / h;
                        (v0, slope)
                    }
                }
            }
            BathSpectrum::BandLimited { inner, low, .. } => {
                if *low > T::zero() {
                    (T::zero(), T::zero())
                } else {
                    inner.zero_limit()?
                }
            }
        })
    }

    /// Characteristic frequency scale of the spectrum.
    pub fn scale(&self) -> T {
        match self {
            BathSpectrum::Lorentzian { tau_c, .. } => T::one() / *tau_c,
            BathSpectrum::Ohmic { omega_cut, .. } => *omega_cut,
            BathSpectrum::Blackbody { cutoff, .. } => *cutoff,
            BathSpectrum::BandGap1D { omega_co, .. } => *omega_co,
            BathSpectrum::Tabulated(t) => {
                let (lo, hi) = t.support();
                (hi - lo) * cst(0.5)
            }
            BathSpectrum::BandLimited { inner, low, high } => inner.scale().min(*high - *low),
        }
    }
}

impl<T: Real> SpectralDensity<T> for BathSpectrum<T> {
    fn density(&self, omega: T) -> Result<T> {
        self.evaluate(omega)
    }

    fn support(&self) -> (T, T) {
        match self {
            BathSpectrum::Lorentzian { .. } => (T::neg_infinity(), T::infinity()),
            BathSpectrum::Ohmic { .. } => (T::zero(), T::infinity()),
            BathSpectrum::Blackbody { cutoff, .. } => (T::zero(), *cutoff),
            BathSpectrum::BandGap1D { omega_co, .. } => (*omega_co, T::infinity()),
            BathSpectrum::Tabulated(t) => t.support(),
            BathSpectrum::BandLimited { inner, high, .. } => {
                let (lo, hi) = inner.support();
                let band_lo = if lo >= T::zero() { T::zero() } else { -*high };
                (lo.max(band_lo), hi.min(*high))
            }
        }
    }

    fn breakpoints(&self) -> Vec<T> {
        match self {
            BathSpectrum::Lorentzian { tau_c, .. } => {
                let w = T::one() / *tau_c;
                vec![-w, T::zero(), w]
            }
            BathSpectrum::Ohmic { omega_cut, .. } => vec![T::zero(), *omega_cut],
            BathSpectrum::Blackbody { cutoff, .. } => vec![T::zero(), *cutoff],
            BathSpectrum::BandGap1D { omega_co, .. } => vec![*omega_co],
            BathSpectrum::Tabulated(t) => {
                let (lo, hi) = t.support();
                let peak = t
                    .omega
                    .iter()
                    .zip(&t.value)
                    .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
                    .map(|p| *p.0)
                    .unwrap_or(lo);
                vec![lo, peak, hi]
            }
            BathSpectrum::BandLimited { inner, low, high } => {
                let (lo, hi) = self.support();
                let mut pts = inner.breakpoints();
                pts.extend([-*high, -*low, *low, *high]);
                pts.retain(|p| *p >= lo && *p <= hi);
                pts
            }
        }
    }

    fn singular_points(&self) -> Vec<T> {
        match self {
            BathSpectrum::BandGap1D { omega_co, .. } => vec![*omega_co],
            BathSpectrum::BandLimited { inner, low, high } => {
                inner.singular_points().into_iter().filter(|p| p.abs() >= *low && p.abs() <= *high).collect()
            }
            _ => Vec::new(),
        }
    }
}

/// Constant spectrum `G = g0` on the whole real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flat<T>(pub T);

impl<T: Real> SpectralDensity<T> for Flat<T> {
    fn density(&self, _omega: T) -> Result<T> {
        Ok(self.0)
    }

    fn support(&self) -> (T, T) {
        if self.0 == T::zero() {
            (T::zero(), T::zero())
        } else {
            (T::neg_infinity(), T::infinity())
        }
    }
}

/// Thermal occupancy `n(omega, T) = 1/(exp(omega/T) - 1)`, zero at `T = 0`.
pub fn occupancy<T: Real>(omega: T, temperature: T) -> Result<T> {
    if !(omega > T::zero()) {
        return Err(domain("omega", f64_of(omega), "occupancy needs omega > 0"));
    }
    if temperature < T::zero() || temperature.is_nan() {
        return Err(domain("temperature", f64_of(temperature), "temperature must be >= 0"));
    }
    if temperature == T::zero() {
        return Ok(T::zero());
    }
    Ok(T::one() / (omega / temperature).exp_m1())
}

/// A spectrum together with the temperature of its bath.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalBath<T> {
    pub spectrum: BathSpectrum<T>,
    pub temperature: T,
}

impl<T: Real> ThermalBath<T> {
    pub fn new(spectrum: BathSpectrum<T>, temperature: T) -> Result<Self> {
        if !(temperature >= T::zero()) || !temperature.is_finite() {
            return Err(invalid("temperature", format!("must be finite and >= 0, got {temperature}")));
        }
        spectrum.validate()?;
        Ok(ThermalBath { spectrum, temperature })
    }

    /// The same bath at zero temperature.
    pub fn ground(&self) -> Self {
        ThermalBath { spectrum: self.spectrum.clone(), temperature: T::zero() }
    }

    /// Temperature-dressed spectrum (see [`thermal_spectrum`]).
    pub fn evaluate(&self, omega: T) -> Result<T> {
        thermal_spectrum(self, omega)
    }
}

/// KMS-dressed spectrum: `(n+1) G(omega)` for `omega > 0`, `n G(|omega|)` for
/// `omega < 0`.
///
/// At `omega = 0` the value is the limit from either side: `G(0+)` at
/// `T = 0`, `T G'(0+)` at `T > 0` when `G(0+) = 0` (ohmic-like spectra).
/// Spectra with `G(0+) > 0` at `T > 0` have no finite limit and are rejected.
/// Frequencies whose magnitude lies outside the base support carry no weight.
pub fn thermal_spectrum<T: Real>(bath: &ThermalBath<T>, omega: T) -> Result<T> {
    let temp = bath.temperature;
    let (lo, hi) = SpectralDensity::support(&bath.spectrum);
    let outside = |w: T| w < lo || w > hi;
    if omega > T::zero() {
        if outside(omega) {
            return Ok(T::zero());
        }
        let g = bath.spectrum.evaluate(omega)?;
        if g == T::zero() {
            return Ok(g);
        }
        return Ok((occupancy(omega, temp)? + T::one()) * g);
    }
    if omega < T::zero() {
        if temp == T::zero() {
            return Ok(T::zero());
        }
        if outside(-omega) {
            return Ok(T::zero());
        }
        let g = bath.spectrum.evaluate(-omega)?;
        if g == T::zero() {
            return Ok(g);
        }
        return Ok(occupancy(-omega, temp)? * g);
    }
    if omega.is_nan() {
        return Err(domain("omega", f64::NAN, "not a number"));
    }
    let (g0, slope) = bath.spectrum.zero_limit()?;
    if temp == T::zero() {
        Ok(g0)
    } else if g0 == T::zero() {
        Ok(temp * slope)
    } else {
        Err(Error::Divergent(format!(
            "thermal spectrum at omega = 0 diverges as T G(0+)/|omega| (G(0+) = {}, T = {})",
            f64_of(g0),
            f64_of(temp)
        )))
    }
}

impl<T: Real> SpectralDensity<T> for ThermalBath<T> {
    fn density(&self, omega: T) -> Result<T> {
        thermal_spectrum(self, omega)
    }

    fn support(&self) -> (T, T) {
        let (lo, hi) = self.spectrum.support();
        let top = hi.max(-lo);
        let bottom = if lo > T::zero() { lo } else { T::zero() };
        if bottom >= top {
            return (T::zero(), T::zero());
        }
        if self.temperature > T::zero() {
            (-top, top)
        } else {
            (bottom, top)
        }
    }

    fn breakpoints(&self) -> Vec<T> {
        let mut pts: Vec<T> = self.spectrum.breakpoints().into_iter().filter(|p| *p >= T::zero()).collect();
        pts.push(T::zero());
        if self.temperature > T::zero() {
            pts.push(self.temperature);
            let mirrored: Vec<T> = pts.iter().map(|p| -*p).collect();
            pts.extend(mirrored);
        }
        pts
    }

    fn singular_points(&self) -> Vec<T> {
        let mut pts: Vec<T> = self.spectrum.singular_points().into_iter().filter(|p| *p > T::zero()).collect();
        if self.temperature > T::zero() {
            let mirrored: Vec<T> = pts.iter().map(|p| -*p).collect();
            pts.extend(mirrored);
        }
        pts
    }

    fn check_integrable(&self) -> Result<()> {
        if self.temperature > T::zero() {
            let (g0, _) = self.spectrum.zero_limit()?;
            if g0 > T::zero() {
                return Err(Error::Divergent(format!(
                    "G(0+) = {} > 0 at T = {}: the thermal spectrum has a non-integrable 1/|omega| singularity at omega = 0",
                    f64_of(g0),
                    f64_of(self.temperature)
                )));
            }
        }
        Ok(())
    }
}
