//! Fisher-information estimation of bath parameters with a controlled qubit
//! probe, plus a Monte-Carlo maximum-likelihood harness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{invalid, Error, Result};
use crate::filters::{ControlKind, ControlProtocol, FilterFunction};
use crate::kk::{coherence_decay, decoherence_rate, lorentzian_exponent, QubitProbeState};
use crate::num::{cst, f64_of, logspace, Real};
use crate::solve::{find_root, scan_then_refine};
use crate::spectra::BathSpectrum;

/// Parameterized bath family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BathFamily<T> {
    Lorentzian { g: T, tau_c: T },
    Ohmic { eta: T, omega_cut: T },
}

/// The bath parameter being estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameter {
    /// Lorentzian coupling strength `g`.
    Coupling,
    /// Lorentzian correlation time `tau_c`.
    CorrelationTime,
    /// Lorentzian dephasing time `T2 = 1/G(0) = pi/(g^2 tau_c)` at fixed `tau_c`.
    DephasingTime,
    /// Ohmic strength `eta`.
    Eta,
    /// Ohmic cutoff `omega_cut`.
    Cutoff,
}

impl<T: Real> BathFamily<T> {
    pub fn spectrum(&self) -> Result<BathSpectrum<T>> {
        match *self {
            BathFamily::Lorentzian { g, tau_c } => BathSpectrum::lorentzian(g, tau_c),
            BathFamily::Ohmic { eta, omega_cut } => BathSpectrum::ohmic(eta, omega_cut),
        }
    }

    pub fn get(&self, p: Parameter) -> Result<T> {
        match (*self, p) {
            (BathFamily::Lorentzian { g, .. }, Parameter::Coupling) => Ok(g),
            (BathFamily::Lorentzian { tau_c, .. }, Parameter::CorrelationTime) => Ok(tau_c),
            (BathFamily::Lorentzian { g, tau_c }, Parameter::DephasingTime) => Ok(T::PI() / (g * g * tau_c)),
            (BathFamily::Ohmic { eta, .. }, Parameter::Eta) => Ok(eta),
            (BathFamily::Ohmic { omega_cut, .. }, Parameter::Cutoff) => Ok(omega_cut),
            _ => Err(invalid("parameter", format!("{p:?} is not a parameter of {self:?}"))),
        }
    }

    pub fn with(&self, p: Parameter, x: T) -> Result<Self> {
        if !(x > T::zero()) || !x.is_finite() {
            return Err(invalid("x_B", format!("parameter value must be finite and > 0, got {x}")));
        }
        self.get(p)?;
        Ok(match (*self, p) {
            (BathFamily::Lorentzian { tau_c, .. }, Parameter::Coupling) => BathFamily::Lorentzian { g: x, tau_c },
            (BathFamily::Lorentzian { g, .. }, Parameter::CorrelationTime) => BathFamily::Lorentzian { g, tau_c: x },
            (BathFamily::Lorentzian { tau_c, .. }, Parameter::DephasingTime) => {
                BathFamily::Lorentzian { g: (T::PI() / (x * tau_c)).sqrt(), tau_c }
            }
            (BathFamily::Ohmic { omega_cut, .. }, Parameter::Eta) => BathFamily::Ohmic { eta: x, omega_cut },
            (BathFamily::Ohmic { eta, .. }, _) => BathFamily::Ohmic { eta, omega_cut: x },
            _ => unreachable!("checked by get"),
        })
    }
}

/// A bath parameter to be estimated with a given control family and probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationProblem<T> {
    pub family: BathFamily<T>,
    pub parameter: Parameter,
    /// Control family; the duration is the optimization variable.
    pub control: ControlKind<T>,
    pub probe: QubitProbeState<T>,
    pub n_measurements: u64,
}

/// Outcome of [`optimize_time`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationReport<T> {
    pub t_opt: T,
    pub qfi_at_opt: T,
    /// `1/(x_B sqrt(N_m F_Q(t_opt)))`.
    pub relative_error_bound: T,
    /// Monte-Carlo RMS relative error, when simulated.
    pub empirical_error: Option<T>,
    pub samples_used: u64,
    /// The maximum sits on the edge of the searched range.
    pub at_boundary: bool,
}

impl<T: Real> EstimationReport<T> {
    /// `relative_error_bound * sqrt(N_m)`, the per-measurement error.
    pub fn scaled_bound(&self) -> T {
        self.relative_error_bound * cst::<T>(self.samples_used as f64).sqrt()
    }
}

impl<T: Real> EstimationProblem<T> {
    pub fn validate(&self) -> Result<()> {
        let x = self.family.get(self.parameter)?;
        if !(x > T::zero()) {
            return Err(invalid("x_B", "parameter value must be > 0"));
        }
        if self.n_measurements == 0 {
            return Err(invalid("n_measurements", "must be >= 1"));
        }
        self.family.spectrum()?;
        Ok(())
    }

    /// True parameter value `x_B`.
    pub fn x(&self) -> T {
        self.family.get(self.parameter).expect("validated problem")
    }

    /// Decay exponent `R(x, t) t` for parameter value `x`.
    pub fn exponent(&self, x: T, t: T) -> Result<T> {
        let family = self.family.with(self.parameter, x)?;
        let filter = FilterFunction::new(ControlProtocol { kind: self.control, duration: t })?;
        if let BathFamily::Lorentzian { g, tau_c } = family {
            if let Some(rt) = lorentzian_exponent(&filter, g, tau_c) {
                return Ok(rt);
            }
        }
        Ok(decoherence_rate(&filter, &family.spectrum()?)? * t)
    }

    /// `d(R t)/dx` by central differences (step `1e-5 x`) with one Richardson step.
    pub fn exponent_derivative(&self, t: T) -> Result<T> {
        derivative(|x| self.exponent(x, t), self.x())
    }

    /// Probability of the `+` outcome at parameter value `x`.
    pub fn p_plus(&self, x: T, t: T) -> Result<T> {
        let rt = self.exponent(x, t)?;
        Ok(coherence_decay(&self.probe, rt / t, t).p_plus)
    }
}

/// Central difference with relative step `1e-5`, Richardson-extrapolated.
fn derivative<T: Real, F: Fn(T) -> Result<T>>(f: F, x: T) -> Result<T> {
    let h = x * cst(1e-5);
    let central = |h: T| -> Result<T> { Ok((f(x + h)? - f(x - h)?) / (h + h)) };
    let d1 = central(h)?;
    let d2 = central(h * cst(0.5))?;
    Ok((cst::<T>(4.0) * d2 - d1) / cst(3.0))
}

/// Quantum Fisher information
/// `F_Q = sin^2(2 theta) e^{-2Rt}/(1 - e^{-2Rt}) (d(Rt)/dx)^2`.
///
/// Zero at `theta` in {0, pi/2} or for a parameter-insensitive exponent;
/// infinite when `R t = 0` with a nonzero derivative.
pub fn qfi<T: Real>(problem: &EstimationProblem<T>, t: T) -> Result<T> {
    problem.validate()?;
    if !(t > T::zero()) {
        return Err(invalid("t", "interrogation time must be > 0"));
    }
    let theta = problem.probe.theta;
    if theta == T::zero() || theta == T::FRAC_PI_2() {
        return Ok(T::zero());
    }
    let d = problem.exponent_derivative(t)?;
    if d == T::zero() {
        return Ok(T::zero());
    }
    let rt = problem.exponent(problem.x(), t)?;
    if rt == T::zero() {
        return Ok(T::infinity());
    }
    let s = (theta + theta).sin();
    Ok(s * s * d * d / (rt + rt).exp_m1())
}

/// Classical Fisher information of the `{p_+, p_-}` record, for comparison
/// with [`qfi`].
pub fn classical_fisher<T: Real>(problem: &EstimationProblem<T>, t: T) -> Result<T> {
    let x = problem.x();
    let p = problem.p_plus(x, t)?;
    let dp = derivative(|xi| problem.p_plus(xi, t), x)?;
    Ok(dp * dp / (p * (T::one() - p)))
}

/// Maximizes `F_Q` over `t` in `t_range` (200-point log grid, then golden
/// section) with the probe fixed at `theta = pi/4`.
pub fn optimize_time<T: Real>(problem: &EstimationProblem<T>, t_range: (T, T)) -> Result<EstimationReport<T>> {
    let (t_lo, t_hi) = t_range;
    if !(t_lo > T::zero() && t_hi > t_lo) {
        return Err(invalid("t_range", "need 0 < t_lo < t_hi"));
    }
    let mut p = *problem;
    p.probe = QubitProbeState::equatorial();
    p.validate()?;
    let grid: Vec<T> = logspace(t_lo, t_hi, 200).into_iter().map(|t| t.ln()).collect();
    let (lt, f, idx) = scan_then_refine(|lt: T| qfi(&p, lt.exp()), &grid, cst(1e-9))?;
    if !(f > T::zero()) || !f.is_finite() {
        return Err(Error::IllPosed(format!("Fisher information {} is not positive and finite", f64_of(f))));
    }
    let bound = T::one() / (p.x() * (cst::<T>(p.n_measurements as f64) * f).sqrt());
    Ok(EstimationReport {
        t_opt: lt.exp(),
        qfi_at_opt: f,
        relative_error_bound: bound,
        empirical_error: None,
        samples_used: p.n_measurements,
        at_boundary: idx == 0 || idx == grid.len() - 1,
    })
}

/// Monte-Carlo statistics of the maximum-likelihood estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationResult<T> {
    /// `sqrt(mean((x_hat - x)^2)) / x`.
    pub rms_relative_error: T,
    /// `mean(|x_hat - x|) / x`.
    pub mean_abs_relative_error: T,
    pub repetitions: usize,
}

pub const REPETITIONS: usize = 200;
const BRACKET: f64 = 4.0;
const MONOTONICITY_PROBES: usize = 64;

/// Simulates `N_m` projective measurements at time `t`, inverts each record
/// for the maximum-likelihood `x_hat` on `[x/4, 4x]`, and repeats 200 times.
///
/// Repetition `r` draws from ChaCha8 seeded with `seed`, stream `r`, so
/// results are reproducible and independent of evaluation order.
pub fn simulate_estimation<T: Real>(problem: &EstimationProblem<T>, t: T, seed: u64) -> Result<SimulationResult<T>> {
    problem.validate()?;
    let x = problem.x();
    let lo = x / cst(BRACKET);
    let hi = x * cst(BRACKET);
    let probes: Vec<T> = logspace(lo, hi, MONOTONICITY_PROBES);
    let values = probes.iter().map(|&xi| problem.p_plus(xi, t)).collect::<Result<Vec<T>>>()?;
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::IllPosed(format!(
            "p_+ is not strictly monotone in x_B on [{}, {}] at t = {}",
            f64_of(lo),
            f64_of(hi),
            f64_of(t)
        )));
    }
    let p_true = problem.p_plus(x, t)?.to_f64().unwrap_or(0.5).clamp(0.0, 1.0);
    let binomial = Binomial::new(problem.n_measurements, p_true).map_err(|e| invalid("p_plus", e.to_string()))?;
    let (p_lo, p_hi) = (values[0], values[values.len() - 1]);
    let n = cst::<T>(problem.n_measurements as f64);

    let mut sq = T::zero();
    let mut abs = T::zero();
    for r in 0..REPETITIONS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let k = binomial.sample(&mut rng);
        let p_hat = cst::<T>(k as f64) / n;
        let x_hat = if (p_hat - p_lo) * (p_hat - p_hi) >= T::zero() {
            // Outside the bracket: the likelihood peaks at the nearer end.
            if (p_hat - p_lo).abs() < (p_hat - p_hi).abs() {
                lo
            } else {
                hi
            }
        } else {
            find_root(|xi| Ok(problem.p_plus(xi, t)? - p_hat), lo, hi, x * cst(1e-12))?
        };
        let e = (x_hat - x) / x;
        sq += e * e;
        abs += e.abs();
    }
    let reps = cst::<T>(REPETITIONS as f64);
    Ok(SimulationResult {
        rms_relative_error: (sq / reps).sqrt(),
        mean_abs_relative_error: abs / reps,
        repetitions: REPETITIONS,
    })
}
