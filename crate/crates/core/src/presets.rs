//! Bundled configurations shared by the scenario runner and the test suites.

use crate::engine::{MachineConfig, Modulation};
use crate::error::Result;
use crate::estimate::{BathFamily, EstimationProblem, Parameter};
use crate::filters::{ControlKind, ControlProtocol, FilterFunction};
use crate::kk::{decoherence_rate, Measurement, QubitProbeState};
use crate::num::linspace;
use crate::spectra::{BathSpectrum, Interpolation, Tabulated, ThermalBath};
use crate::waveguide::{RB87_D1_GAMMA, RB87_EXCHANGE_TIME};

/// Channel bath for state transfer: a Lorentzian with its low-frequency
/// part removed, so a smooth modulation of duration `TRANSFER_TIME` sees only
/// the far filter tails.
pub fn transfer_bath() -> BathSpectrum<f64> {
    let inner = BathSpectrum::Lorentzian { g: 0.05, tau_c: 1.0 };
    BathSpectrum::BandLimited { inner: Box::new(inner), low: 2.0, high: 40.0 }
}

pub const TRANSFER_TIME: f64 = 30.0;

/// Estimation of `tau_c` for a Lorentzian bath with `g tau_c = g_tau`.
pub fn correlation_time_problem(control: ControlKind<f64>, g_tau: f64, n_measurements: u64) -> EstimationProblem<f64> {
    EstimationProblem {
        family: BathFamily::Lorentzian { g: g_tau, tau_c: 1.0 },
        parameter: Parameter::CorrelationTime,
        control,
        probe: QubitProbeState::equatorial(),
        n_measurements,
    }
}

pub const ESTIMATION_TIME_RANGE: (f64, f64) = (1e-4, 1e3);

/// True spectrum, frequency grid and the measurements taken on it.
pub type InversionSetup = (BathSpectrum<f64>, Vec<f64>, Vec<Measurement<f64>>);

/// Synthetic narrowband measurements of a Lorentzian (`g = 1`, `tau_c = 1`):
/// 40 detuned drive filters of duration `20 tau_c` centred on the returned grid.
pub fn inversion_measurements() -> Result<InversionSetup> {
    let truth = BathSpectrum::lorentzian(1.0, 1.0)?;
    let grid: Vec<f64> = linspace(-5.0, 5.0, 40);
    let measurements = grid
        .iter()
        .map(|&w| {
            let filter = FilterFunction::new(ControlProtocol::drive(-w, 20.0))?;
            let rate = decoherence_rate(&filter, &truth)?;
            Ok(Measurement { filter, rate })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((truth, grid, measurements))
}

pub const INVERSION_REGULARIZATION: f64 = 1e-6;

/// Gaussian peak at `3` (width `0.7`) on `[0.2, 8]`, at unit temperature,
/// probed by a qubit of frequency `ZENO_OMEGA0`.
pub fn zeno_bath() -> Result<ThermalBath<f64>> {
    let grid: Vec<f64> = linspace(0.2, 8.0, 400);
    let values: Vec<f64> = grid.iter().map(|w| 0.05 * (-((w - 3.0) / 0.7).powi(2) / 2.0).exp()).collect();
    let table = Tabulated::new(grid, values, Interpolation::MonotoneCubic)?;
    ThermalBath::new(BathSpectrum::Tabulated(table), 1.0)
}

pub const ZENO_OMEGA0: f64 = 1.0;

/// Exchange rate and linewidth whose first complete transfer takes
/// `RB87_EXCHANGE_TIME` at the Rb-87 D1 linewidth.
pub fn rb87_exchange() -> (f64, f64) {
    (std::f64::consts::FRAC_PI_2 / RB87_EXCHANGE_TIME, RB87_D1_GAMMA)
}

/// Two-harmonic machine with strictly separated baths: the hot blackbody
/// only above `omega0`, the cold Lorentzian only below.
pub fn separated_machine(omega_mod: f64, t_hot: f64, t_cold: f64) -> Result<MachineConfig<f64>> {
    let omega0 = 10.0;
    let hot = BathSpectrum::band_limited(BathSpectrum::blackbody(1e-3, 40.0)?, omega0, 40.0)?;
    let cold = BathSpectrum::band_limited(BathSpectrum::lorentzian(1.0, 0.2)?, 0.0, omega0)?;
    Ok(MachineConfig {
        omega0,
        omega_mod,
        hot: ThermalBath::new(hot, t_hot)?,
        cold: ThermalBath::new(cold, t_cold)?,
        modulation: Modulation::PiFlip,
        harmonic_cut: 1,
    })
}

pub const MACHINE_T_HOT: f64 = 20.0;
pub const MACHINE_T_COLD: f64 = 5.0;

/// Machine whose hot blackbody spans all frequencies below its cutoff and
/// whose cold Lorentzian is cut off at `omega0`: the lower sideband sees both
/// baths, the upper one only the hot bath.
pub fn overlapping_machine() -> Result<MachineConfig<f64>> {
    let hot = BathSpectrum::blackbody(1e-8, 40.0)?;
    let cold = BathSpectrum::band_limited(BathSpectrum::lorentzian(1.0, 0.5)?, 0.0, 10.0)?;
    Ok(MachineConfig {
        omega0: 10.0,
        omega_mod: 3.0,
        hot: ThermalBath::new(hot, MACHINE_T_HOT)?,
        cold: ThermalBath::new(cold, 2.0)?,
        modulation: Modulation::PiFlip,
        harmonic_cut: 1,
    })
}
