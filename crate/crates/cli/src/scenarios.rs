//! Per-point evaluation of each scenario kind.

use bathforge::collective::{evolve, ghz_fidelity, DephasingKernel, DickeState};
use bathforge::engine::{critical_modulation, occupation_gap, steady_state, MachineConfig, Modulation, Regime};
use bathforge::error::Result;
use bathforge::estimate::{optimize_time, simulate_estimation};
use bathforge::filters::{ControlKind, ControlProtocol, FilterFunction};
use bathforge::kk::{
    coherence_decay, decoherence_rate, infer_spectrum, measurement_thermodynamics, Measurement, QubitProbeState,
};
use bathforge::num::linspace;
use bathforge::presets;
use bathforge::spectra::{BathSpectrum, ThermalBath};
use bathforge::transfer::{transfer_fidelity, TransferChannel};
use bathforge::waveguide::{
    casimir_shape, nonadditivity_ratio, rddi_strength_range, tem_pair_energy, two_atom_dynamics, BandEdgeConfig,
    Geometry, TEMLineConfig, Zone,
};

use crate::config::ScenarioKind;
use crate::params::Params;

/// Output column: name and unit.
pub type Column = (&'static str, &'static str);

pub fn columns(kind: ScenarioKind) -> &'static [Column] {
    use ScenarioKind::*;
    match kind {
        Spectra => &[("g", "freq"), ("g_thermal", "freq")],
        Decohere => &[("rate", "freq"), ("exponent", "-"), ("coherence", "-"), ("p_plus", "-"), ("p_minus", "-")],
        Diagnose => &[("omega", "freq"), ("estimate", "freq"), ("truth", "freq"), ("rel_error", "-")],
        Estimate => &[
            ("t_opt", "tau_c"),
            ("qfi", "1/tau_c^2"),
            ("error_bound", "-"),
            ("scaled_bound", "-"),
            ("at_boundary", "bool"),
            ("mc_rms_error", "-"),
        ],
        Transfer => &[("infidelity", "-"), ("fidelity", "-"), ("in_regime", "bool")],
        Cat => &[("lamb_phase", "rad"), ("decoherence", "-"), ("ghz_fidelity", "-")],
        Rddi => &[("delta", "freq"), ("xi", "length"), ("p1", "-"), ("p2", "-"), ("concurrence", "-")],
        Casimir => &[
            ("z_over_lambda", "-"),
            ("u_tem", "energy"),
            ("shape_near", "-"),
            ("shape_far", "-"),
            ("ratio_3d", "-"),
            ("ratio_1d", "-"),
        ],
        Engine => &[
            ("p_excited", "-"),
            ("j_hot", "energy/time"),
            ("j_cold", "energy/time"),
            ("power", "energy/time"),
            ("regime", "code"),
            ("eta_or_cop", "-"),
            ("entropy_production", "1/time"),
            ("occupation_gap", "-"),
        ],
        Zeno => &[("r_up", "freq"), ("r_down", "freq"), ("t_eff", "freq"), ("t_eff_over_t", "-")],
    }
}

/// Output columns worth plotting against the first sweep axis.
pub fn plot_columns(kind: ScenarioKind) -> &'static [&'static str] {
    use ScenarioKind::*;
    match kind {
        Spectra => &["g", "g_thermal"],
        Decohere => &["coherence"],
        Diagnose => &["estimate", "truth"],
        Estimate => &["scaled_bound"],
        Transfer => &["infidelity"],
        Cat => &["ghz_fidelity"],
        Rddi => &["concurrence"],
        Casimir => &["u_tem"],
        Engine => &["eta_or_cop"],
        Zeno => &["t_eff_over_t"],
    }
}

/// Regime code written to engine tables.
pub fn regime_code(r: Regime) -> f64 {
    match r {
        Regime::Idle => 0.0,
        Regime::Engine => 1.0,
        Regime::Refrigerator => 2.0,
        Regime::Dissipator => 3.0,
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

pub fn bath_spectrum(p: &Params) -> Result<BathSpectrum<f64>> {
    match p.text("family") {
        "lorentzian" => BathSpectrum::lorentzian(p.num("g"), p.num("tau_c")),
        "ohmic" => BathSpectrum::ohmic(p.num("eta"), p.num("omega_cut")),
        "blackbody" => BathSpectrum::blackbody(p.num("amplitude"), p.num("cutoff")),
        _ => BathSpectrum::band_gap(p.num("omega_co"), p.num("gamma_fs")),
    }
}

fn control(p: &Params) -> ControlProtocol<f64> {
    let t = p.num("t");
    match p.text("control") {
        "free" => ControlProtocol::free(t),
        "cpmg" => ControlProtocol::cpmg(p.int("n_pulses") as usize, t),
        "drive" => ControlProtocol::drive(p.num("rabi"), t),
        _ => ControlProtocol::sin_p(p.int("p") as u8, p.num("alpha0"), t),
    }
}

pub fn machine(p: &Params) -> Result<MachineConfig<f64>> {
    let (th, tc) = (p.num("t_hot"), p.num("t_cold"));
    let mut m = match p.text("machine") {
        "separated" => presets::separated_machine(p.num("omega_mod"), th, tc)?,
        _ => {
            let base = presets::overlapping_machine()?;
            MachineConfig {
                omega_mod: p.num("omega_mod"),
                hot: ThermalBath::new(base.hot.spectrum, th)?,
                cold: ThermalBath::new(base.cold.spectrum, tc)?,
                ..base
            }
        }
    };
    m.harmonic_cut = p.int("harmonic_cut").clamp(0, u32::MAX as i64) as u32;
    m.modulation = match p.text("modulation") {
        "piflip" => Modulation::PiFlip,
        _ => Modulation::Sinusoidal { depth: p.num("depth") },
    };
    Ok(m)
}

/// Records that hold for the whole run, evaluated at the base parameters.
pub fn summary(kind: ScenarioKind, base: &Params, swept: &[String]) -> Result<Vec<(&'static str, f64)>> {
    match kind {
        ScenarioKind::Engine if !swept.iter().any(|s| s == "t_hot" || s == "t_cold" || s == "machine") => {
            let m = machine(base)?;
            let oc = critical_modulation(m.omega0, m.hot.temperature, m.cold.temperature)?;
            Ok(vec![("omega_crit", oc.unwrap_or(f64::NAN))])
        }
        _ => Ok(Vec::new()),
    }
}

/// Rows produced by one grid point.
pub fn evaluate(kind: ScenarioKind, p: &Params, seed: u64) -> Result<Vec<Vec<f64>>> {
    use ScenarioKind::*;
    let row = match kind {
        Spectra => {
            let s = bath_spectrum(p)?;
            let w = p.num("omega");
            let bare = s.evaluate(w)?;
            let temp = p.num("temperature");
            let thermal = if temp > 0.0 { ThermalBath::new(s, temp)?.evaluate(w)? } else { bare };
            vec![bare, thermal]
        }
        Decohere => {
            let filter = FilterFunction::new(control(p))?;
            let s = bath_spectrum(p)?;
            let temp = p.num("temperature");
            let rate = if temp > 0.0 {
                decoherence_rate(&filter, &ThermalBath::new(s, temp)?)?
            } else {
                decoherence_rate(&filter, &s)?
            };
            let probe = QubitProbeState::new(p.num("theta"), p.num("phi"))?;
            let r = coherence_decay(&probe, rate, p.num("t"));
            vec![r.rate, r.exponent, r.coherence, r.p_plus, r.p_minus]
        }
        Diagnose => return diagnose(p),
        Estimate => {
            let kind = match p.text("control") {
                "free" => ControlKind::Free,
                _ => ControlKind::Cpmg { n_pulses: p.int("n_pulses") as usize },
            };
            let problem = presets::correlation_time_problem(kind, p.num("g_tau"), p.int("n_measurements") as u64);
            let report = optimize_time(&problem, (p.num("t_min"), p.num("t_max")))?;
            let mc = if p.int("simulate") != 0 {
                simulate_estimation(&problem, report.t_opt, seed)?.rms_relative_error
            } else {
                f64::NAN
            };
            vec![
                report.t_opt,
                report.qfi_at_opt,
                report.relative_error_bound,
                report.scaled_bound(),
                flag(report.at_boundary),
                mc,
            ]
        }
        Transfer => {
            let inner = BathSpectrum::lorentzian(p.num("g"), p.num("tau_c"))?;
            let bath = match p.text("bath") {
                "band_limited" => BathSpectrum::band_limited(inner, p.num("low"), p.num("high"))?,
                _ => inner,
            };
            let channel = TransferChannel {
                bath,
                transfer_time: p.num("transfer_time"),
                p: p.int("p") as u8,
                alpha0: p.num("alpha0"),
            };
            let out = transfer_fidelity(&channel)?;
            vec![out.infidelity, out.fidelity, flag(out.in_regime)]
        }
        Cat => {
            let kernel = match p.text("kernel") {
                "bath" => {
                    let bath =
                        ThermalBath::new(BathSpectrum::ohmic(p.num("eta"), p.num("omega_cut"))?, p.num("temperature"))?;
                    DephasingKernel::with_suppression(bath, p.num("kappa"))?
                }
                _ => DephasingKernel::markovian(p.num("f_rate"), p.num("gamma_rate"))?,
            };
            let t = p.num("t");
            let state = DickeState::x_polarized(p.int("n_qubits").max(0) as usize)?;
            let out = evolve(&state, &kernel, p.num("omega0"), t)?;
            vec![kernel.lamb_phase(t)?, kernel.decoherence_exponent(t)?, ghz_fidelity(&out)?]
        }
        Rddi => {
            let cfg = BandEdgeConfig {
                omega_a: p.num("omega_a"),
                omega_co: p.num("omega_co"),
                gamma_fs: p.num("gamma_fs"),
                lambda_a: p.num("lambda_a"),
            };
            let r = rddi_strength_range(&cfg)?;
            let s = two_atom_dynamics(r.delta, cfg.gamma_fs, &[p.num("t")])?[0];
            vec![r.delta, r.xi, s.p1, s.p2, s.concurrence]
        }
        Casimir => {
            let cfg = TEMLineConfig::new(p.num("lambda_e"), p.num("a"), p.num("alpha0"))?;
            let z = p.num("z");
            let x = z / cfg.lambda_e;
            vec![
                x,
                tem_pair_energy(&cfg, z)?,
                casimir_shape(x, Zone::Near).unwrap_or(f64::NAN),
                casimir_shape(x, Zone::Far).unwrap_or(f64::NAN),
                nonadditivity_ratio(cfg.alpha0, z, Geometry::FreeSpace3D)?,
                nonadditivity_ratio(cfg.alpha0, z, Geometry::TEM1D { a: cfg.a })?,
            ]
        }
        Engine => {
            let m = machine(p)?;
            let s = steady_state(&m)?;
            vec![
                s.p_excited,
                s.j_hot,
                s.j_cold,
                s.power,
                regime_code(s.regime),
                s.efficiency_or_cop.unwrap_or(f64::NAN),
                s.entropy_production,
                occupation_gap(&m)?,
            ]
        }
        Zeno => {
            let base = presets::zeno_bath()?;
            let temp = p.num("temperature");
            let bath = ThermalBath::new(base.spectrum, temp)?;
            let r = measurement_thermodynamics(&bath, p.num("omega0"), p.num("tau"))?;
            vec![r.r_up, r.r_down, r.t_eff, r.t_eff / temp]
        }
    };
    Ok(vec![row])
}

fn diagnose(p: &Params) -> Result<Vec<Vec<f64>>> {
    let truth = BathSpectrum::lorentzian(p.num("g"), p.num("tau_c"))?;
    let w_max = p.num("omega_max");
    let grid = linspace(-w_max, w_max, p.int("measurements").max(1) as usize);
    let measurements = grid
        .iter()
        .map(|&w| {
            let filter = FilterFunction::new(ControlProtocol::drive(-w, p.num("duration")))?;
            let rate = decoherence_rate(&filter, &truth)?;
            Ok(Measurement { filter, rate })
        })
        .collect::<Result<Vec<_>>>()?;
    let est = infer_spectrum(&measurements, &grid, p.num("regularization"))?;
    est.grid
        .iter()
        .zip(&est.values)
        .map(|(&w, &v)| {
            let g = truth.evaluate(w)?;
            Ok(vec![w, v, g, v / g - 1.0])
        })
        .collect()
}
