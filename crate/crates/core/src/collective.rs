//! Collective dephasing of `N` identical qubits coupled to one bosonic bath.
//!
//! States live in the symmetric subspace, labelled by the eigenvalues
//! `m = N, N-2, ..., -N` of `L_z = sum_j sigma_z_j`. Index `k` counts flipped
//! spins, so `m = N - 2k`; `k = 0` is the all-up state.

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::linalg::{symmetric_eigenvalues, Square};
use crate::num::{cst, f64_of, Real};
use crate::quad::{segments_from_points, Quadrature, Segment};
use crate::solve::scan_then_refine;
use crate::spectra::{thermal_spectrum, BathSpectrum, SpectralDensity, ThermalBath};

pub const MAX_QUBITS: usize = 14;

/// Density matrix on the `(N+1)`-dimensional symmetric subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeState<T> {
    n: usize,
    rho: Vec<Complex<T>>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl<T: Real> DickeState<T> {
    fn check_n(n: usize) -> Result<()> {
        if n == 0 || n > MAX_QUBITS {
            return Err(invalid("n_qubits", format!("must lie in 1..={MAX_QUBITS}, got {n}")));
        }
        Ok(())
    }

    /// Projector onto a pure state given by its amplitudes over `k`.
    pub fn pure(amplitudes: &[Complex<T>]) -> Result<Self> {
        let n = amplitudes.len().wrapping_sub(1);
        Self::check_n(n)?;
        let norm: T = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !(norm > T::zero()) {
            return Err(invalid("amplitudes", "state vector has zero norm"));
        }
        let d = n + 1;
        let mut rho = vec![Complex::new(T::zero(), T::zero()); d * d];
        for i in 0..d {
            for j in 0..d {
                rho[i * d + j] = amplitudes[i] * amplitudes[j].conj() / norm;
            }
        }
        Ok(DickeState { n, rho })
    }

    /// Validated density matrix, row-major over `k`.
    pub fn from_matrix(n: usize, rho: Vec<Complex<T>>) -> Result<Self> {
        Self::check_n(n)?;
        let d = n + 1;
        if rho.len() != d * d {
            return Err(invalid("rho", format!("expected {} entries, got {}", d * d, rho.len())));
        }
        let s = DickeState { n, rho };
        let tol: T = cst(1e-10);
        if (s.trace() - T::one()).abs() > tol {
            return Err(invalid("rho", "trace must be 1"));
        }
        for i in 0..d {
            for j in 0..d {
                if (s.get(i, j) - s.get(j, i).conj()).norm() > tol {
                    return Err(invalid("rho", "matrix is not Hermitian"));
                }
            }
        }
        if s.min_eigenvalue() < -tol {
            return Err(invalid("rho", "matrix is not positive semidefinite"));
        }
        Ok(s)
    }

    /// `|m = N>`, every spin up.
    pub fn all_up(n: usize) -> Result<Self> {
        let mut a = vec![Complex::new(T::zero(), T::zero()); n + 1];
        a[0] = Complex::new(T::one(), T::zero());
        Self::pure(&a)
    }

    /// `|m = -N>`, every spin down.
    pub fn all_down(n: usize) -> Result<Self> {
        let mut a = vec![Complex::new(T::zero(), T::zero()); n + 1];
        a[n] = Complex::new(T::one(), T::zero());
        Self::pure(&a)
    }

    /// `(|up...up> + e^{i chi}|down...down>)/sqrt(2)`.
    pub fn ghz(n: usize, chi: T) -> Result<Self> {
        let mut a = vec![Complex::new(T::zero(), T::zero()); n + 1];
        a[0] = Complex::new(T::one(), T::zero());
        a[n] = Complex::from_polar(T::one(), chi);
        Self::pure(&a)
    }

    /// Amplitudes of the spin-coherent product state
    /// `(cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>)^N`.
    pub fn coherent_amplitudes(n: usize, theta: T, phi: T) -> Vec<Complex<T>> {
        let (c, s) = ((theta * cst(0.5)).cos(), (theta * cst(0.5)).sin());
        (0..=n)
            .map(|k| {
                let mag = cst::<T>(binomial(n, k).sqrt()) * c.powi((n - k) as i32) * s.powi(k as i32);
                Complex::from_polar(mag, phi * cst(k as f64))
            })
            .collect()
    }

    pub fn coherent(n: usize, theta: T, phi: T) -> Result<Self> {
        Self::pure(&Self::coherent_amplitudes(n, theta, phi))
    }

    /// Spin-coherent state polarized along `+x`.
    pub fn x_polarized(n: usize) -> Result<Self> {
        Self::coherent(n, T::FRAC_PI_2(), T::zero())
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// `L_z` eigenvalue of basis index `k`.
    pub fn m_of(&self, k: usize) -> i64 {
        self.n as i64 - 2 * k as i64
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.rho[i * (self.n + 1) + j]
    }

    pub fn matrix(&self) -> &[Complex<T>] {
        &self.rho
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).map(|i| self.get(i, i).re).sum()
    }

    /// Populations `rho_kk`.
    pub fn populations(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.get(i, i).re).collect()
    }

    /// `<psi| rho |phi>` for vectors over `k`.
    pub fn sandwich(&self, psi: &[Complex<T>], phi: &[Complex<T>]) -> Complex<T> {
        let d = self.dim();
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..d {
            if psi[i] == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            let mut row = Complex::new(T::zero(), T::zero());
            for j in 0..d {
                row = row + self.get(i, j) * phi[j];
            }
            acc = acc + psi[i].conj() * row;
        }
        acc
    }

    /// Smallest eigenvalue, via the real symmetric embedding `[[A, -B], [B, A]]`.
    pub fn min_eigenvalue(&self) -> T {
        let d = self.dim();
        let mut m = Square::zeros(2 * d);
        for i in 0..d {
            for j in 0..d {
                let z = self.get(i, j);
                m.set(i, j, z.re);
                m.set(i + d, j + d, z.re);
                m.set(i, j + d, -z.im);
                m.set(i + d, j, z.im);
            }
        }
        symmetric_eigenvalues(&m)[0]
    }
}

/// Time dependence of the collective dephasing: Lamb phase `f(t)` and
/// decoherence exponent `gamma(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum DephasingKernel<T> {
    /// Exact kernel of a thermal bath; `suppression` scales `gamma` to model
    /// phase flips that average out the linear coupling.
    Bath { bath: ThermalBath<T>, suppression: T },
    /// `f = f_rate t`, `gamma = gamma_rate t`.
    Markovian { f_rate: T, gamma_rate: T },
}

/// Cap on the initial oscillation panels; adaptive refinement does the rest.
const MAX_KERNEL_PANELS: f64 = 4096.0;
/// Exact integration runs up to this multiple of the spectrum's largest
/// finite feature (or its scale).
const KERNEL_REACH: f64 = 40.0;

/// `x - sin x`, accurate for small `x`.
fn x_minus_sin<T: Real>(x: T) -> T {
    if x.abs() < cst(0.1) {
        let x2 = x * x;
        x * x2 / cst(6.0) * (T::one() - x2 / cst(20.0) * (T::one() - x2 / cst(42.0) * (T::one() - x2 / cst(72.0))))
    } else {
        x - x.sin()
    }
}

impl<T: Real> DephasingKernel<T> {
    /// Kernel of `bath`, rejecting spectra for which `gamma` diverges.
    pub fn from_bath(bath: ThermalBath<T>) -> Result<Self> {
        Self::with_suppression(bath, T::one())
    }

    pub fn with_suppression(bath: ThermalBath<T>, suppression: T) -> Result<Self> {
        if !(suppression >= T::zero() && suppression <= T::one()) {
            return Err(invalid("suppression", format!("must lie in [0, 1], got {suppression}")));
        }
        let (g0, _) = bath.spectrum.zero_limit()?;
        if bath.temperature > T::zero() && g0 > T::zero() {
            return Err(Error::Divergent(format!(
                "decoherence exponent is infrared divergent: G(0+) = {} at T = {} gives an integrand ~ 1/omega",
                f64_of(g0),
                f64_of(bath.temperature)
            )));
        }
        Ok(DephasingKernel::Bath { bath, suppression })
    }

    pub fn markovian(f_rate: T, gamma_rate: T) -> Result<Self> {
        if !(gamma_rate >= T::zero()) || !f_rate.is_finite() || !gamma_rate.is_finite() {
            return Err(invalid("gamma_rate", "rates must be finite with gamma_rate >= 0"));
        }
        Ok(DephasingKernel::Markovian { f_rate, gamma_rate })
    }

    /// `f(t) = int_0^inf G(omega) (omega t - sin omega t)/omega^2 domega`, using the
    /// zero-temperature spectrum.
    pub fn lamb_phase(&self, t: T) -> Result<T> {
        match self {
            DephasingKernel::Markovian { f_rate, .. } => Ok(*f_rate * t),
            DephasingKernel::Bath { bath, .. } => {
                if t == T::zero() {
                    return Ok(T::zero());
                }
                let g = &bath.spectrum;
                half_line(
                    g,
                    t,
                    |w| Ok(g.evaluate(w)? * x_minus_sin(w * t) / (w * w)),
                    |w| Ok(t * g.evaluate(w)? / w),
                    |w| Ok(-(g.evaluate(w)? / (w * w)) * (w * t).cos() / t),
                )
            }
        }
    }

    /// `gamma(t) = int_0^inf G(omega) coth(omega/2T) (1 - cos omega t)/omega^2 domega`.
    pub fn decoherence_exponent(&self, t: T) -> Result<T> {
        match self {
            DephasingKernel::Markovian { gamma_rate, .. } => Ok(*gamma_rate * t),
            DephasingKernel::Bath { bath, suppression } => {
                if t == T::zero() || *suppression == T::zero() {
                    return Ok(T::zero());
                }
                let g = &bath.spectrum;
                let temp = bath.temperature;
                let weight = move |w: T| -> Result<T> {
                    let v = g.evaluate(w)?;
                    if v == T::zero() || temp == T::zero() {
                        return Ok(v);
                    }
                    Ok(v / (w / (temp + temp)).tanh())
                };
                let value = half_line(
                    g,
                    t,
                    |w| {
                        let s = (w * t * cst(0.5)).sin();
                        Ok(weight(w)? * cst::<T>(2.0) * s * s / (w * w))
                    },
                    |w| Ok(weight(w)? / (w * w)),
                    |w| Ok(weight(w)? / (w * w) * (w * t).sin() / t),
                )?;
                Ok(value * *suppression)
            }
        }
    }
}

/// `int_0^inf` of an oscillatory kernel integrand: `full` on panels of width
/// `2 pi / t` up to a cutoff, then `smooth` (the cycle average) plus the
/// leading boundary term `edge` of the oscillating remainder.
fn half_line<T, F, S, E>(g: &BathSpectrum<T>, t: T, full: F, smooth: S, edge: E) -> Result<T>
where
    T: Real,
    F: Fn(T) -> Result<T>,
    S: Fn(T) -> Result<T>,
    E: Fn(T) -> Result<T>,
{
    let (lo, hi) = SpectralDensity::support(g);
    let lo = lo.max(T::zero());
    if !(hi > lo) {
        return Ok(T::zero());
    }
    let finite: Vec<T> = g
        .breakpoints()
        .into_iter()
        .chain(g.singular_points())
        .chain([lo, hi])
        .filter(|x| x.is_finite() && *x >= T::zero())
        .collect();
    let reach = finite.iter().copied().fold(g.scale(), T::max);
    let cutoff = hi.min(reach * cst(KERNEL_REACH));
    let period = T::TAU() / t;
    let panels = ((cutoff - lo) / period).ceil().min(cst(MAX_KERNEL_PANELS)).max(T::one());
    let step = (cutoff - lo) / panels;
    let mut points: Vec<T> = (0..=panels.to_usize().unwrap_or(1)).map(|i| lo + step * cst(i as f64)).collect();
    points.extend(finite.iter().copied().filter(|x| *x > lo && *x < cutoff));
    points.push(cutoff);
    let singular: Vec<T> = g.singular_points().into_iter().filter(|x| *x >= lo && *x <= cutoff).collect();
    let quad = Quadrature::with_rel_tol(cst(1e-10));
    let core = quad.integrate_segments(
        |w| if w <= T::zero() { Ok(T::zero()) } else { full(w) },
        &segments_from_points(&points, &singular),
    )?;
    if cutoff >= hi {
        return Ok(core.value);
    }
    let tail = quad.integrate_segments(&smooth, &[Segment::between(cutoff, hi, false, false)])?;
    Ok(core.value + tail.value - edge(cutoff)?)
}

/// Exact evolution under collective dephasing:
/// `rho_mm' -> rho_mm' exp(-i omega0 (m - m') t) exp(i f (m'^2 - m^2)) exp(-(m - m')^2 gamma)`.
pub fn evolve<T: Real>(state: &DickeState<T>, kernel: &DephasingKernel<T>, omega0: T, t: T) -> Result<DickeState<T>> {
    let f = kernel.lamb_phase(t)?;
    let gamma = kernel.decoherence_exponent(t)?;
    Ok(evolve_with(state, omega0 * t, f, gamma))
}

/// As [`evolve`] with the accumulated precession phase `omega0 t`, Lamb
/// phase `f` and exponent `gamma` given directly.
pub fn evolve_with<T: Real>(state: &DickeState<T>, precession: T, f: T, gamma: T) -> DickeState<T> {
    let d = state.dim();
    let mut rho = state.rho.clone();
    for i in 0..d {
        let m: T = cst(state.m_of(i) as f64);
        for j in 0..d {
            if i == j {
                continue;
            }
            let mp: T = cst(state.m_of(j) as f64);
            let dm = m - mp;
            let phase = -precession * dm + f * (mp * mp - m * m);
            let factor = Complex::from_polar((-dm * dm * gamma).exp(), phase);
            rho[i * d + j] = rho[i * d + j] * factor;
        }
    }
    DickeState { n: state.n, rho }
}

/// `max_chi <GHZ(chi)| rho |GHZ(chi)> = (rho_aa + rho_bb)/2 + |rho_ab|` for the
/// cat built on two antipodal collective poles `a`, `b`. The poles are the
/// `z` axis and every equatorial axis; one-axis twisting of an equatorially
/// polarized state produces its cat on an equatorial axis.
pub fn ghz_fidelity<T: Real>(state: &DickeState<T>) -> Result<T> {
    let n = state.n;
    if n < 2 {
        return Err(invalid("n_qubits", "GHZ fidelity needs at least two qubits"));
    }
    let pole = (state.get(0, 0).re + state.get(n, n).re) * cst(0.5) + state.get(0, n).norm();
    let along = |phi: T| -> Result<T> {
        let a = DickeState::coherent_amplitudes(n, T::FRAC_PI_2(), phi);
        let b = DickeState::coherent_amplitudes(n, T::FRAC_PI_2(), phi + T::PI());
        let aa = state.sandwich(&a, &a).re;
        let bb = state.sandwich(&b, &b).re;
        Ok((aa + bb) * cst(0.5) + state.sandwich(&a, &b).norm())
    };
    // Period in phi is pi; the fidelity is a trigonometric polynomial of degree
    // at most 2N, so 8N samples resolve every local maximum.
    let samples = 8 * n + 1;
    let grid: Vec<T> = (0..samples).map(|i| T::PI() * cst(i as f64 / (samples - 1) as f64)).collect();
    let (_, equatorial, _) = scan_then_refine(along, &grid, cst(1e-12))?;
    Ok(pole.max(equatorial).min(T::one()).max(T::zero()))
}

/// Principal value `P int G(omega)/omega domega` over the support of `G`, by
/// symmetric excision with radii `eps, eps/2, eps/4` and Richardson
/// extrapolation to zero radius.
pub fn lamb_shift_rate<T: Real>(spectrum: &BathSpectrum<T>) -> Result<T> {
    spectrum.validate()?;
    let (lo, hi) = SpectralDensity::support(spectrum);
    if !(hi > lo) {
        return Ok(T::zero());
    }
    let scale = spectrum.scale();
    let delta = scale * cst(1e-9);
    let g_plus = if lo <= T::zero() && hi > T::zero() { spectrum.zero_limit()?.0 } else { T::zero() };
    let g_minus = if lo < T::zero() && hi >= T::zero() { spectrum.evaluate(-delta)? } else { T::zero() };
    let quad = Quadrature::with_rel_tol(cst(1e-12));
    let mut breaks: Vec<T> = spectrum.breakpoints();
    breaks.retain(|x| x.is_finite());
    let singular = spectrum.singular_points();
    let side = |a: T, b: T| -> Result<T> {
        if !(b > a) {
            return Ok(T::zero());
        }
        let mut pts = vec![a, b];
        pts.extend(breaks.iter().copied().filter(|x| *x > a && *x < b));
        let sing: Vec<T> = singular.iter().copied().filter(|x| *x >= a && *x <= b).collect();
        let est = quad.integrate_with_singularities(
            |w| if w == T::zero() { Ok(T::zero()) } else { Ok(spectrum.evaluate(w)? / w) },
            &pts,
            &sing,
        )?;
        Ok(est.value)
    };
    // Magnitude of G, sampled over its main band, sets the continuity tolerance.
    let (a, b) = (lo.max(-scale * cst(10.0)), hi.min(scale * cst(10.0)));
    let mut peak = g_plus.abs().max(g_minus.abs());
    for i in 0..=64 {
        let w = a + (b - a) * cst(i as f64 / 64.0);
        peak = peak.max(spectrum.evaluate(w)?.abs());
    }
    if g_plus.abs().max(g_minus.abs()) <= cst::<T>(1e-12) * peak {
        return Ok(side(lo, hi.min(T::zero()))? + side(lo.max(T::zero()), hi)?);
    }
    let mismatch = (g_plus - g_minus).abs();
    if mismatch > cst::<T>(1e-6) * peak {
        return Err(Error::Divergent(format!(
            "principal value of G/omega needs G continuous at 0, got G(0-) = {} and G(0+) = {}",
            f64_of(g_minus),
            f64_of(g_plus)
        )));
    }
    let eps = scale * cst(1e-3);
    let excised = |r: T| -> Result<T> { Ok(side(lo, -r)? + side(r, hi)?) };
    let i1 = excised(eps)?;
    let i2 = excised(eps * cst(0.5))?;
    let i4 = excised(eps * cst(0.25))?;
    let r1 = i2 + i2 - i1;
    let r2 = i4 + i4 - i2;
    let value = (cst::<T>(8.0) * i4 - cst::<T>(6.0) * i2 + i1) / cst(3.0);
    let reference = peak + value.abs();
    if (value - r2).abs() > cst::<T>(1e-6) * reference || (r2 - r1).abs() > cst::<T>(1e-4) * reference {
        return Err(Error::Divergent(format!(
            "principal value did not converge under excision (estimates {}, {}, {})",
            f64_of(i1),
            f64_of(i2),
            f64_of(i4)
        )));
    }
    Ok(value)
}

/// Virtual-exchange rate against real-quanta decoherence rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dominance<T> {
    pub f_ab: T,
    /// `2 pi G_T(0)`.
    pub gamma: T,
    /// `f_ab / gamma`, infinite when `gamma = 0`.
    pub ratio: T,
    pub gamma_vanishes: bool,
}

pub fn dominance_ratio<T: Real>(bath: &ThermalBath<T>) -> Result<Dominance<T>> {
    let gamma = T::TAU() * thermal_spectrum(bath, T::zero())?;
    let f_ab = lamb_shift_rate(&bath.spectrum)?;
    let gamma_vanishes = gamma == T::zero();
    let ratio = if gamma_vanishes { T::infinity() } else { f_ab / gamma };
    Ok(Dominance { f_ab, gamma, ratio, gamma_vanishes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn ghz_fidelity_of_reference_states() {
        let up = DickeState::<f64>::all_up(4).unwrap();
        assert!((ghz_fidelity(&up).unwrap() - 0.5).abs() < 1e-12);
        let cat = DickeState::<f64>::ghz(5, 0.3).unwrap();
        assert!((ghz_fidelity(&cat).unwrap() - 1.0).abs() < 1e-12);
        let mut rho = vec![c(0.0); 16];
        rho[0] = c(0.5);
        rho[15] = c(0.5);
        let mixed = DickeState::from_matrix(3, rho).unwrap();
        assert!((ghz_fidelity(&mixed).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn one_axis_twisting_forms_a_cat() {
        for n in 2..=10 {
            let s = DickeState::<f64>::x_polarized(n).unwrap();
            let out = evolve_with(&s, 0.0, std::f64::consts::PI / 8.0, 0.0);
            let f = ghz_fidelity(&out).unwrap();
            assert!(f > 1.0 - 1e-9, "n = {n}: {f}");
        }
    }

    #[test]
    fn single_qubit_coherence_decays_with_four_gamma() {
        let s = DickeState::<f64>::coherent(1, std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        let out = evolve_with(&s, 0.0, 0.0, 0.2);
        assert!((out.get(0, 1).re - 0.5 * (-0.8_f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn ohmic_zero_temperature_kernel() {
        let (eta, wc) = (0.05, 2.0);
        let bath = ThermalBath::new(BathSpectrum::ohmic(eta, wc).unwrap(), 0.0).unwrap();
        let k = DephasingKernel::from_bath(bath).unwrap();
        for t in [0.1, 1.0, 7.0, 40.0] {
            let x: f64 = wc * t;
            let g = k.decoherence_exponent(t).unwrap();
            let f = k.lamb_phase(t).unwrap();
            assert!((g - 0.5 * eta * (1.0 + x * x).ln()).abs() < 1e-8 * g.max(1e-3), "gamma({t}) = {g}");
            assert!((f - eta * (x - x.atan())).abs() < 1e-8 * f.max(1e-3), "f({t}) = {f}");
        }
        assert_eq!(k.decoherence_exponent(0.0).unwrap(), 0.0);
    }

    #[test]
    fn hot_lorentzian_kernel_diverges() {
        let bath = ThermalBath::new(BathSpectrum::lorentzian(1.0, 1.0).unwrap(), 0.5).unwrap();
        assert!(matches!(DephasingKernel::from_bath(bath), Err(Error::Divergent(_))));
    }

    #[test]
    fn lamb_shift_closed_forms() {
        let r = lamb_shift_rate(&BathSpectrum::ohmic(0.1_f64, 3.0).unwrap()).unwrap();
        assert!((r - 0.3).abs() < 1e-10);
        let r = lamb_shift_rate(&BathSpectrum::lorentzian(1.0_f64, 2.0).unwrap()).unwrap();
        assert!(r.abs() < 1e-9);
    }

    #[test]
    fn dominance_of_ohmic_bath() {
        let bath = ThermalBath::new(BathSpectrum::ohmic(0.1_f64, 5.0).unwrap(), 0.2).unwrap();
        let d = dominance_ratio(&bath).unwrap();
        assert!((d.ratio - 5.0 / (std::f64::consts::TAU * 0.2)).abs() < 1e-8);
        let cold = dominance_ratio(&bath.ground()).unwrap();
        assert!(cold.gamma_vanishes && cold.ratio.is_infinite());
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(DickeState::from_matrix(1, vec![c(0.5), c(0.0), c(0.0), c(0.4)]).is_err());
        assert!(DickeState::from_matrix(1, vec![c(0.5), c(0.6), c(0.6), c(0.5)]).is_err());
        assert!(DickeState::<f64>::all_up(15).is_err());
    }
}
