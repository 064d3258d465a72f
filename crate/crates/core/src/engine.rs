//! Periodically modulated qubit between a hot and a cold bath.
//!
//! Modulating the qubit frequency at rate `Omega` splits each bath into
//! sub-baths probed at `omega_q = omega0 + q Omega` with weights `P_q`. The
//! populations obey a two-level rate equation whose steady state and heat
//! currents are computed in closed form.
//!
//! Sign conventions: heat currents are positive when flowing from the bath
//! into the qubit; power is positive when delivered to the modulating field.

use crate::error::{invalid, Error, Result};
use crate::num::{cst, f64_of, Real};
use crate::solve::find_root;
use crate::special::bessel_j;
use crate::spectra::{occupancy, thermal_spectrum, ThermalBath};

#[derive(Debug, Clone, PartialEq)]
pub enum Modulation<T> {
    /// Periodic pi phase flips: square-wave sidebands at odd `q`.
    PiFlip,
    /// Sinusoidal frequency modulation with index `depth` = amplitude / `Omega`.
    Sinusoidal { depth: T },
    /// Explicit `(q, weight)` pairs, renormalized to unit sum.
    Custom(Vec<(i32, T)>),
}

/// Sideband weights `P_q` for `|q| <= harmonic_cut`, ordered by `q`, summing to one.
pub fn harmonic_weights<T: Real>(modulation: &Modulation<T>, harmonic_cut: u32) -> Result<Vec<(i32, T)>> {
    if harmonic_cut == 0 {
        return Err(invalid("harmonic_cut", "must be >= 1"));
    }
    let cut = harmonic_cut as i32;
    let raw: Vec<(i32, T)> = match modulation {
        Modulation::PiFlip => (-cut..=cut)
            .map(|q| {
                let w = if q % 2 == 0 {
                    T::zero()
                } else {
                    let c = cst::<T>(2.0) / (T::PI() * cst(q as f64));
                    c * c
                };
                (q, w)
            })
            .collect(),
        Modulation::Sinusoidal { depth } => {
            if !depth.is_finite() || *depth < T::zero() {
                return Err(invalid("depth", format!("must be finite and >= 0, got {depth}")));
            }
            (-cut..=cut)
                .map(|q| {
                    let j = bessel_j(q, *depth);
                    (q, j * j)
                })
                .collect()
        }
        Modulation::Custom(pairs) => {
            if pairs.iter().any(|(_, w)| !(*w >= T::zero()) || !w.is_finite()) {
                return Err(invalid("weights", "harmonic weights must be finite and >= 0"));
            }
            let mut v: Vec<(i32, T)> = (-cut..=cut).map(|q| (q, T::zero())).collect();
            for &(q, w) in pairs {
                if q.abs() <= cut {
                    v[(q + cut) as usize].1 += w;
                }
            }
            v
        }
    };
    let total: T = raw.iter().map(|p| p.1).sum();
    if !(total > T::zero()) {
        return Err(invalid("weights", "no harmonic weight within the cut"));
    }
    Ok(raw.into_iter().map(|(q, w)| (q, w / total)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MachineConfig<T> {
    pub omega0: T,
    /// Modulation rate `Omega`.
    pub omega_mod: T,
    pub hot: ThermalBath<T>,
    pub cold: ThermalBath<T>,
    pub modulation: Modulation<T>,
    pub harmonic_cut: u32,
}

impl<T: Real> MachineConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > T::zero()) || !self.omega0.is_finite() {
            return Err(invalid("omega0", "must be finite and > 0"));
        }
        if !(self.omega_mod > T::zero() && self.omega_mod < self.omega0) {
            return Err(invalid("omega_mod", "modulation rate must lie in (0, omega0)"));
        }
        if !(self.hot.temperature > T::zero()) || !(self.cold.temperature > T::zero()) {
            return Err(invalid("temperature", "both baths need a positive temperature"));
        }
        Ok(())
    }

    pub fn with_omega_mod(&self, omega_mod: T) -> Self {
        MachineConfig { omega_mod, ..self.clone() }
    }

    pub fn channel(&self, q: i32) -> T {
        self.omega0 + self.omega_mod * cst(q as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Power delivered to the modulation.
    Engine,
    /// Heat drawn from the cold bath at the expense of power.
    Refrigerator,
    /// Currents below the numerical floor.
    Idle,
    /// Power absorbed and dumped as heat without cooling either bath.
    Dissipator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MachineOperatingPoint<T> {
    pub p_excited: T,
    pub j_hot: T,
    pub j_cold: T,
    pub power: T,
    pub regime: Regime,
    /// Efficiency `P/J_h` for an engine, `J_c/(-P)` for a refrigerator.
    pub efficiency_or_cop: Option<T>,
    pub entropy_production: T,
    /// Population balance `p_e sum gamma_down - p_g sum gamma_up`, relative to the total rate.
    pub balance_residual: T,
}

/// Idle band relative to the natural current scale.
pub const IDLE_TOLERANCE: f64 = 1e-14;

struct Channel<T> {
    omega: T,
    up: T,
    down: T,
    hot: bool,
}

fn channels<T: Real>(config: &MachineConfig<T>) -> Result<Vec<Channel<T>>> {
    let weights = harmonic_weights(&config.modulation, config.harmonic_cut)?;
    let mut out = Vec::with_capacity(2 * weights.len());
    for (bath, hot) in [(&config.hot, true), (&config.cold, false)] {
        for &(q, p) in &weights {
            if p == T::zero() {
                continue;
            }
            let w = config.channel(q);
            if w == T::zero() {
                continue;
            }
            let down = p * thermal_spectrum(bath, w)?;
            let up = p * thermal_spectrum(bath, -w)?;
            if down == T::zero() && up == T::zero() {
                continue;
            }
            out.push(Channel { omega: w, up, down, hot });
        }
    }
    Ok(out)
}

/// Steady state of the rate equations and the heat currents it carries.
pub fn steady_state<T: Real>(config: &MachineConfig<T>) -> Result<MachineOperatingPoint<T>> {
    config.validate()?;
    let ch = channels(config)?;
    let up: T = ch.iter().map(|c| c.up).sum();
    let down: T = ch.iter().map(|c| c.down).sum();
    let total = up + down;
    if !(total > T::zero()) {
        return Err(Error::IllPosed("every rate channel vanishes; no steady state".into()));
    }
    let p_e = up / total;
    let p_g = down / total;
    // Net upward flux through channel i as a sum of antisymmetric pair terms,
    // j_i = sum_k (up_i down_k - down_i up_k) / total, so the fluxes of
    // every pair of channels cancel to rounding.
    let mut j_hot = T::zero();
    let mut j_cold = T::zero();
    let mut scale = T::zero();
    for (i, c) in ch.iter().enumerate() {
        let flux =
            ch.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, o)| c.up * o.down - c.down * o.up).sum::<T>()
                / total;
        let heat = c.omega * flux;
        if c.hot {
            j_hot += heat;
        } else {
            j_cold += heat;
        }
        scale += c.omega.abs() * (c.up * p_g + c.down * p_e);
    }
    let power = j_hot + j_cold;
    let floor = scale * cst(IDLE_TOLERANCE);
    let regime = if power.abs() <= floor && j_cold.abs() <= floor {
        Regime::Idle
    } else if power > T::zero() {
        Regime::Engine
    } else if j_cold > T::zero() {
        Regime::Refrigerator
    } else {
        Regime::Dissipator
    };
    let efficiency_or_cop = match regime {
        Regime::Engine => Some(power / j_hot),
        Regime::Refrigerator => Some(j_cold / -power),
        _ => None,
    };
    let entropy_production = -j_hot / config.hot.temperature - j_cold / config.cold.temperature;
    let balance_residual = (p_e * down - p_g * up) / total;
    Ok(MachineOperatingPoint {
        p_excited: p_e,
        j_hot,
        j_cold,
        power,
        regime,
        efficiency_or_cop,
        entropy_production,
        balance_residual,
    })
}

/// Modulation rate at which `n_h(omega0 + Omega) = n_c(omega0 - Omega)`,
/// i.e. `(omega0 + Omega)/T_h = (omega0 - Omega)/T_c`, found by bracketing the
/// sign change on `(0, omega0)`. `None` when there is no crossing.
pub fn critical_modulation<T: Real>(omega0: T, t_hot: T, t_cold: T) -> Result<Option<T>> {
    if !(t_hot > T::zero() && t_cold > T::zero()) {
        return Err(invalid("temperature", "both baths need a positive temperature"));
    }
    let sign = |om: T| -> Result<T> {
        // n is decreasing in omega/T, so this has the sign of n_h - n_c.
        Ok((omega0 - om) / t_cold - (omega0 + om) / t_hot)
    };
    let (lo, hi) = (T::zero(), omega0);
    let (a, b) = (sign(lo)?, sign(hi)?);
    if a == T::zero() {
        return Ok(Some(lo));
    }
    if a.signum() == b.signum() {
        return Ok(None);
    }
    find_root(sign, lo, hi, omega0 * T::epsilon()).map(Some)
}

/// `n_h(omega0 + Omega) - n_c(omega0 - Omega)`: positive on the engine side.
pub fn occupation_gap<T: Real>(config: &MachineConfig<T>) -> Result<T> {
    Ok(occupancy(config.channel(1), config.hot.temperature)? - occupancy(config.channel(-1), config.cold.temperature)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyCurve<T> {
    pub rows: Vec<(T, MachineOperatingPoint<T>)>,
    pub omega_crit: Option<T>,
}

/// Operating points over a grid of modulation rates.
pub fn efficiency_curve<T: Real>(config: &MachineConfig<T>, omega_grid: &[T]) -> Result<EfficiencyCurve<T>> {
    let rows =
        omega_grid.iter().map(|&om| Ok((om, steady_state(&config.with_omega_mod(om))?))).collect::<Result<Vec<_>>>()?;
    let omega_crit = critical_modulation(config.omega0, config.hot.temperature, config.cold.temperature)?;
    Ok(EfficiencyCurve { rows, omega_crit })
}

/// Threshold on the leakage fractions; reaching it counts as unseparated.
pub const LEAKAGE_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationReport<T> {
    /// `G^c(omega0 + Omega)`.
    pub cold_at_upper: T,
    /// `G^h(omega0 - Omega)`.
    pub hot_at_lower: T,
    /// Cold emission rate at the upper sideband relative to the hot one.
    pub cold_leakage: T,
    /// Hot emission rate at the lower sideband relative to the cold one.
    pub hot_leakage: T,
    /// False when either leakage is `>= LEAKAGE_THRESHOLD`.
    pub separated: bool,
}

pub fn spectral_separation_report<T: Real>(config: &MachineConfig<T>) -> Result<SeparationReport<T>> {
    config.validate()?;
    let (upper, lower) = (config.channel(1), config.channel(-1));
    let ratio = |leak: T, main: T| {
        if leak == T::zero() {
            T::zero()
        } else if main == T::zero() {
            T::infinity()
        } else {
            leak / main
        }
    };
    let cold_leakage = ratio(thermal_spectrum(&config.cold, upper)?, thermal_spectrum(&config.hot, upper)?);
    let hot_leakage = ratio(thermal_spectrum(&config.hot, lower)?, thermal_spectrum(&config.cold, lower)?);
    let threshold = cst::<T>(LEAKAGE_THRESHOLD);
    Ok(SeparationReport {
        cold_at_upper: config.cold.spectrum.evaluate(upper)?,
        hot_at_lower: config.hot.spectrum.evaluate(lower)?,
        cold_leakage,
        hot_leakage,
        separated: cold_leakage < threshold && hot_leakage < threshold,
    })
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Engine => "engine",
            Regime::Refrigerator => "refrigerator",
            Regime::Idle => "idle",
            Regime::Dissipator => "dissipator",
        })
    }
}

/// Diagnostic string for an operating point, used in error reports.
pub fn describe<T: Real>(p: &MachineOperatingPoint<T>) -> String {
    format!("{} (P = {:e}, J_h = {:e}, J_c = {:e})", p.regime, f64_of(p.power), f64_of(p.j_hot), f64_of(p.j_cold))
}
