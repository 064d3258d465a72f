//! Overlap engine: decoherence rates `R = int F_t G domega`, coherence decay,
//! bath-spectrum inversion from filter scans, and measurement-interval rates.

use crate::error::{invalid, Error, Result};
use crate::filters::{ControlProtocol, FilterFunction};
use crate::linalg::{cholesky, nnls_normal, Square};
use crate::num::{cst, f64_of, Real};
use crate::quad::{segments_from_points, Estimate, Quadrature};
use crate::spectra::{Interpolation, SpectralDensity, Tabulated, ThermalBath};

/// Filter periods evaluated exactly on each side of the filter centre.
/// Beyond them the filter is replaced by its cycle average; the neglected
/// oscillatory remainder is `O((2 pi M)^-3)` relative.
const EXACT_PERIODS: f64 = 256.0;
const MAX_INITIAL_PANELS: f64 = 4096.0;

/// Qubit probe `cos(theta)|up> + exp(-i phi) sin(theta)|down>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitProbeState<T> {
    pub theta: T,
    pub phi: T,
}

impl<T: Real> QubitProbeState<T> {
    pub fn new(theta: T, phi: T) -> Result<Self> {
        if !(theta >= T::zero() && theta <= T::FRAC_PI_2()) {
            return Err(invalid("theta", format!("must lie in [0, pi/2], got {theta}")));
        }
        if !(phi >= T::zero() && phi < T::TAU()) {
            return Err(invalid("phi", format!("must lie in [0, 2 pi), got {phi}")));
        }
        Ok(QubitProbeState { theta, phi })
    }

    /// The optimal estimation probe, `theta = pi/4`, `phi = 0`.
    pub fn equatorial() -> Self {
        QubitProbeState { theta: T::FRAC_PI_4(), phi: T::zero() }
    }

    /// Initial coherence `<sigma_x(0)> = sin(2 theta) cos(phi)`.
    pub fn sigma_x(&self) -> T {
        (self.theta + self.theta).sin() * self.phi.cos()
    }
}

/// Coherence and measurement statistics after time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceRecord<T> {
    pub time: T,
    pub rate: T,
    pub exponent: T,
    pub coherence: T,
    pub p_plus: T,
    pub p_minus: T,
}

/// Overlap `int F_t(omega) G(omega) domega` with the default tolerance (1e-10).
pub fn decoherence_rate<T, S>(filter: &FilterFunction<T>, spectrum: &S) -> Result<T>
where
    T: Real,
    S: SpectralDensity<T> + ?Sized,
{
    Ok(overlap(filter, spectrum, &Quadrature::with_rel_tol(cst(1e-10)))?.value)
}

/// Overlap integral with explicit quadrature settings and error estimate.
///
/// The region within `EXACT_PERIODS` oscillations of the filter centre (and of
/// every finite spectral feature) is integrated with the exact filter on
/// period-sized panels; the infinite remainder uses the cycle-averaged tail.
pub fn overlap<T, S>(filter: &FilterFunction<T>, spectrum: &S, quad: &Quadrature<T>) -> Result<Estimate<T>>
where
    T: Real,
    S: SpectralDensity<T> + ?Sized,
{
    spectrum.check_integrable()?;
    let (lo, hi) = spectrum.support();
    if !(lo < hi) {
        return Ok(Estimate { value: T::zero(), error: T::zero(), evaluations: 0, segments: 0 });
    }
    let t = filter.duration();
    let c = filter.center();
    let base = T::TAU() / t;
    let period = filter.period();
    let breaks = spectrum.breakpoints();
    let singular = spectrum.singular_points();
    let reach = breaks
        .iter()
        .chain(singular.iter())
        .chain([lo, hi].iter())
        .filter(|x| x.is_finite())
        .fold(T::zero(), |m, x| m.max((*x - c).abs()));
    let lambda = period * ((reach / period).ceil() + cst(EXACT_PERIODS));
    let core_lo = lo.max(c - lambda);
    let core_hi = hi.min(c + lambda);

    let mut points = Vec::new();
    if core_lo < core_hi {
        let panels = (cst::<T>(2.0) * lambda / base).min(cst(MAX_INITIAL_PANELS));
        let step = base * ((cst::<T>(2.0) * lambda / base) / panels).ceil();
        let first = ((core_lo - c) / step).ceil();
        let last = ((core_hi - c) / step).floor();
        let mut k = first;
        while k <= last {
            points.push(c + k * step);
            k += T::one();
        }
        points.push(core_lo);
        points.push(core_hi);
    }
    if lo < core_lo {
        points.push(lo);
        points.push(core_lo);
    }
    if hi > core_hi {
        points.push(core_hi);
        points.push(hi);
    }
    points.extend(breaks.iter().copied().filter(|x| *x > lo && *x < hi));
    let singular: Vec<T> = singular.into_iter().filter(|x| *x >= lo && *x <= hi).collect();
    let segments = segments_from_points(&points, &singular);

    let tail_lo = c - lambda;
    let tail_hi = c + lambda;
    let integrand = |w: T| -> Result<T> {
        let g = spectrum.density(w)?;
        if g == T::zero() {
            return Ok(g);
        }
        let f = if w < tail_lo || w > tail_hi { filter.tail_value(w) } else { filter.evaluate(w) };
        Ok(f * g)
    };
    let mut est = quad.integrate_segments(integrand, &segments)?;
    est.value = est.value.max(T::zero());
    Ok(est)
}

/// State of the probe after time `t` at rate `rate`: coherence
/// `<sigma_x(0)> exp(-R t)` and `p_+- = (1 +- coherence)/2`.
pub fn coherence_decay<T: Real>(probe: &QubitProbeState<T>, rate: T, t: T) -> DecoherenceRecord<T> {
    let exponent = rate * t;
    let coherence = probe.sigma_x() * (-exponent).exp();
    let p_plus = (T::one() + coherence) * cst(0.5);
    DecoherenceRecord { time: t, rate, exponent, coherence, p_plus, p_minus: T::one() - p_plus }
}

/// `x - (1 - e^-x)` without cancellation for small `x`.
fn excess<T: Real>(x: T) -> T {
    if x < cst(1e-3) {
        let x2 = x * x;
        x2 * (cst::<T>(0.5) - x / cst(6.0) + x2 / cst(24.0) - x2 * x / cst(120.0))
    } else {
        x + (-x).exp_m1()
    }
}

/// Exact `R t` for a Lorentzian bath and a piecewise `+-1` control, from the
/// bath correlation function `g^2 exp(-|s|/tau_c)`.
///
/// Returns `None` for protocols without a sign-segment representation.
pub fn lorentzian_exponent<T: Real>(filter: &FilterFunction<T>, g: T, tau_c: T) -> Option<T> {
    let segments = filter.sign_segments()?;
    let mut sum = T::zero();
    let decay: Vec<T> = segments.iter().map(|s| -(-(s.1 - s.0) / tau_c).exp_m1()).collect();
    for (i, si) in segments.iter().enumerate() {
        sum += cst::<T>(2.0) * excess((si.1 - si.0) / tau_c);
        for (j, sj) in segments.iter().enumerate().skip(i + 1) {
            let gap = sj.0 - si.1;
            sum += cst::<T>(2.0) * si.2 * sj.2 * (-gap / tau_c).exp() * decay[i] * decay[j];
        }
    }
    Some(g * g * tau_c * tau_c * sum / T::TAU())
}

/// Exact Lorentzian rate `R = (R t)/t`; see [`lorentzian_exponent`].
pub fn lorentzian_rate<T: Real>(filter: &FilterFunction<T>, g: T, tau_c: T) -> Option<T> {
    lorentzian_exponent(filter, g, tau_c).map(|rt| rt / filter.duration())
}

/// A filter together with the rate measured under it.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement<T> {
    pub filter: FilterFunction<T>,
    pub rate: T,
}

/// Piecewise-constant spectrum estimate on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate<T> {
    pub grid: Vec<T>,
    pub values: Vec<T>,
    /// `|A G - R|_2` of the returned solution.
    pub residual_norm: T,
}

impl<T: Real> SpectrumEstimate<T> {
    /// Monotone-cubic table through the estimate (needs at least two nodes).
    pub fn to_tabulated(&self) -> Result<Tabulated<T>> {
        Tabulated::new(self.grid.clone(), self.values.clone(), Interpolation::MonotoneCubic)
    }
}

/// Integral of the filter over `[a, b]`, either end possibly infinite.
fn filter_mass<T: Real>(filter: &FilterFunction<T>, a: T, b: T) -> Result<T> {
    let window = Window { lo: a, hi: b };
    Ok(overlap(filter, &window, &Quadrature::with_rel_tol(cst(1e-11)))?.value)
}

struct Window<T> {
    lo: T,
    hi: T,
}

impl<T: Real> SpectralDensity<T> for Window<T> {
    fn density(&self, _omega: T) -> Result<T> {
        Ok(T::one())
    }

    fn support(&self) -> (T, T) {
        (self.lo, self.hi)
    }
}

/// Inverts `R_i = int F_i G domega` for a piecewise-constant `G` on the
/// Voronoi cells of `grid` (outer cells extend to infinity).
///
/// Solves `min |A G - R|^2 + lambda s |G|^2` with `G >= 0`, where `s` is the
/// mean diagonal of `A^T A`, so `regularization` is dimensionless.
pub fn infer_spectrum<T: Real>(
    measurements: &[Measurement<T>],
    grid: &[T],
    regularization: T,
) -> Result<SpectrumEstimate<T>> {
    if measurements.is_empty() {
        return Err(invalid("measurements", "at least one measurement is required"));
    }
    if grid.is_empty() {
        return Err(invalid("grid", "frequency grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("grid", "must be strictly increasing"));
    }
    if !(regularization >= T::zero()) {
        return Err(invalid("regularization", "must be >= 0"));
    }
    let n = grid.len();
    let m = measurements.len();
    let mut edges = vec![T::neg_infinity()];
    edges.extend(grid.windows(2).map(|w| (w[0] + w[1]) * cst(0.5)));
    edges.push(T::infinity());

    let mut rows = Vec::with_capacity(m);
    for meas in measurements {
        let mut row = vec![T::zero(); n];
        let mut inner = T::zero();
        for j in 1..n.saturating_sub(1) {
            row[j] = filter_mass(&meas.filter, edges[j], edges[j + 1])?;
            inner += row[j];
        }
        if n == 1 {
            row[0] = meas.filter.total_weight();
        } else {
            row[0] = filter_mass(&meas.filter, edges[0], edges[1])?;
            row[n - 1] = (meas.filter.total_weight() - inner - row[0]).max(T::zero());
        }
        rows.push(row);
    }
    let gram = Square::gram(&rows, n);
    let rhs: Vec<T> = (0..n).map(|j| rows.iter().zip(measurements).map(|(r, me)| r[j] * me.rate).sum()).collect();
    let mean_diag = (0..n).map(|i| gram.get(i, i)).sum::<T>() / cst(n as f64);
    let lambda = regularization * mean_diag;
    if lambda == T::zero() && (m < n || cholesky(&gram).is_none()) {
        return Err(Error::RankDeficient { unknowns: n, equations: m });
    }
    let values = nnls_normal(&gram, &rhs, lambda, m)?;
    let residual_norm = rows
        .iter()
        .zip(measurements)
        .map(|(r, me)| {
            let pred: T = r.iter().zip(&values).map(|(a, g)| *a * *g).sum();
            (pred - me.rate) * (pred - me.rate)
        })
        .sum::<T>()
        .sqrt();
    Ok(SpectrumEstimate { grid: grid.to_vec(), values, residual_norm })
}

/// Interval-limited relaxation and excitation rates of a two-level system of
/// frequency `omega0` measured every `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZenoRates<T> {
    pub r_up: T,
    pub r_down: T,
    /// `omega0 / ln(R_down / R_up)`; infinite when the rates coincide.
    pub t_eff: T,
}

/// Rates under the free filter of duration `tau` translated to `+-omega0`:
/// `R_down = int F_tau(omega - omega0) G_T`, `R_up = int F_tau(omega + omega0) G_T`.
pub fn measurement_thermodynamics<T: Real>(bath: &ThermalBath<T>, omega0: T, tau: T) -> Result<ZenoRates<T>> {
    if !(omega0 > T::zero()) {
        return Err(invalid("omega0", "transition frequency must be > 0"));
    }
    let down = FilterFunction::new(ControlProtocol::drive(-omega0, tau))?;
    let up = FilterFunction::new(ControlProtocol::drive(omega0, tau))?;
    let r_down = decoherence_rate(&down, bath)?;
    let r_up = decoherence_rate(&up, bath)?;
    if r_down == T::zero() {
        return Err(Error::Domain {
            quantity: "R_down",
            value: 0.0,
            reason: "effective temperature undefined without a relaxation channel".into(),
        });
    }
    let t_eff = if r_up == T::zero() {
        T::zero()
    } else if r_up == r_down {
        T::infinity()
    } else {
        omega0 / (r_down / r_up).ln()
    };
    Ok(ZenoRates { r_up, r_down, t_eff })
}

/// Rate record for sweep output: `(t, R, R t, coherence, p_+)`.
pub fn sweep_row<T: Real>(record: &DecoherenceRecord<T>) -> [f64; 5] {
    [f64_of(record.time), f64_of(record.rate), f64_of(record.exponent), f64_of(record.coherence), f64_of(record.p_plus)]
}
