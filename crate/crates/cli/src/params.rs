//! Per-scenario parameter schemas.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::ScenarioKind;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, Copy)]
pub enum Default {
    Real(f64),
    Integer(i64),
    Choice(&'static str, &'static [&'static str]),
}

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub unit: &'static str,
    pub default: Default,
}

impl ParamSpec {
    pub fn is_numeric(&self) -> bool {
        !matches!(self.default, Default::Choice(..))
    }

    pub fn is_integer(&self) -> bool {
        matches!(self.default, Default::Integer(_))
    }
}

const fn real(name: &'static str, unit: &'static str, v: f64) -> ParamSpec {
    ParamSpec { name, unit, default: Default::Real(v) }
}

const fn int(name: &'static str, v: i64) -> ParamSpec {
    ParamSpec { name, unit: "-", default: Default::Integer(v) }
}

const fn choice(name: &'static str, v: &'static str, options: &'static [&'static str]) -> ParamSpec {
    ParamSpec { name, unit: "-", default: Default::Choice(v, options) }
}

pub const FAMILIES: &[&str] = &["lorentzian", "ohmic", "blackbody", "band_gap"];

const BATH: [ParamSpec; 10] = [
    choice("family", "lorentzian", FAMILIES),
    real("g", "freq", 1.0),
    real("tau_c", "time", 1.0),
    real("eta", "-", 0.1),
    real("omega_cut", "freq", 10.0),
    real("amplitude", "1/freq^2", 1e-3),
    real("cutoff", "freq", 40.0),
    real("omega_co", "freq", 1.0),
    real("gamma_fs", "freq", 1.0),
    real("temperature", "freq", 0.0),
];

pub fn schema(kind: ScenarioKind) -> Vec<ParamSpec> {
    use ScenarioKind::*;
    match kind {
        Spectra => [&BATH[..], &[real("omega", "freq", 0.5)]].concat(),
        Decohere => [
            &BATH[..],
            &[
                choice("control", "free", &["free", "cpmg", "drive", "sinp"]),
                int("n_pulses", 8),
                real("rabi", "freq", 0.0),
                int("p", 2),
                real("alpha0", "-", 1.0),
                real("t", "time", 1.0),
                real("theta", "rad", std::f64::consts::FRAC_PI_2),
                real("phi", "rad", 0.0),
            ],
        ]
        .concat(),
        Diagnose => vec![
            real("g", "freq", 1.0),
            real("tau_c", "time", 1.0),
            int("measurements", 40),
            real("omega_max", "freq", 5.0),
            real("duration", "time", 20.0),
            real("regularization", "-", 1e-6),
        ],
        Estimate => vec![
            choice("control", "cpmg", &["free", "cpmg"]),
            int("n_pulses", 8),
            real("g_tau", "-", 5.0),
            int("n_measurements", 10_000),
            real("t_min", "tau_c", 1e-4),
            real("t_max", "tau_c", 1e3),
            int("simulate", 1),
        ],
        Transfer => vec![
            choice("bath", "band_limited", &["band_limited", "lorentzian"]),
            real("g", "freq", 0.05),
            real("tau_c", "time", 1.0),
            real("low", "freq", 2.0),
            real("high", "freq", 40.0),
            int("p", 2),
            real("alpha0", "-", 1.0),
            real("transfer_time", "time", 30.0),
        ],
        Cat => vec![
            int("n_qubits", 4),
            choice("kernel", "bath", &["bath", "markovian"]),
            real("eta", "-", 0.05),
            real("omega_cut", "freq", 5.0),
            real("temperature", "freq", 0.5),
            real("kappa", "-", 0.0),
            real("f_rate", "freq", 0.3),
            real("gamma_rate", "freq", 0.0),
            real("omega0", "freq", 0.0),
            real("t", "time", 1.0),
        ],
        Rddi => vec![
            real("omega_a", "freq", 0.9),
            real("omega_co", "freq", 1.0),
            real("gamma_fs", "freq", 1.0),
            real("lambda_a", "length", 1.0),
            real("t", "time", 1.0),
        ],
        Casimir => vec![
            real("lambda_e", "length", 1.0),
            real("a", "length", 0.02),
            real("alpha0", "length^3", 1e-3),
            real("z", "length", 50.0),
        ],
        Engine => vec![
            choice("machine", "separated", &["separated", "overlapping"]),
            real("omega_mod", "freq", 3.0),
            real("t_hot", "freq", bathforge::presets::MACHINE_T_HOT),
            real("t_cold", "freq", bathforge::presets::MACHINE_T_COLD),
            int("harmonic_cut", 1),
            choice("modulation", "piflip", &["piflip", "sinusoidal"]),
            real("depth", "-", 1.0),
        ],
        Zeno => vec![
            real("tau", "time", 1.0),
            real("omega0", "freq", bathforge::presets::ZENO_OMEGA0),
            real("temperature", "freq", 1.0),
        ],
    }
}

/// Resolved parameter values for one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    values: BTreeMap<&'static str, Value>,
}

impl Params {
    pub fn resolve(kind: ScenarioKind, given: &BTreeMap<String, Value>) -> Result<Self, CliError> {
        let specs = schema(kind);
        let mut values = BTreeMap::new();
        for spec in &specs {
            let v = match spec.default {
                Default::Real(x) => Value::Number(x),
                Default::Integer(n) => Value::Number(n as f64),
                Default::Choice(c, _) => Value::Text(c.to_string()),
            };
            values.insert(spec.name, v);
        }
        for (name, v) in given {
            let path = format!("params.{name}");
            let Some(spec) = specs.iter().find(|s| s.name == name) else {
                return Err(CliError::Schema { path, message: format!("not a parameter of {kind}") });
            };
            match (&spec.default, v) {
                (Default::Real(_), Value::Number(x)) if x.is_finite() => {}
                (Default::Integer(_), Value::Number(x)) if x.fract() == 0.0 => {}
                (Default::Choice(_, options), Value::Text(t)) if options.contains(&t.as_str()) => {}
                (Default::Choice(_, options), _) => {
                    return Err(CliError::Schema { path, message: format!("expected one of {options:?}") });
                }
                (Default::Integer(_), _) => {
                    return Err(CliError::Schema { path, message: "expected an integer".into() })
                }
                (Default::Real(_), _) => {
                    return Err(CliError::Schema { path, message: "expected a finite number".into() })
                }
            }
            values.insert(spec.name, v.clone());
        }
        Ok(Params { values })
    }

    /// Copy with the numeric parameter `name` set to `x`.
    pub fn with(&self, name: &str, x: f64) -> Self {
        let mut out = self.clone();
        if let Some(slot) = out.values.iter_mut().find(|(k, _)| **k == name) {
            *slot.1 = Value::Number(x);
        }
        out
    }

    pub fn num(&self, name: &str) -> f64 {
        match self.values.get(name) {
            Some(Value::Number(x)) => *x,
            other => panic!("parameter `{name}` is not numeric: {other:?}"),
        }
    }

    pub fn int(&self, name: &str) -> i64 {
        self.num(name) as i64
    }

    pub fn text(&self, name: &str) -> &str {
        match self.values.get(name) {
            Some(Value::Text(t)) => t,
            other => panic!("parameter `{name}` is not a choice: {other:?}"),
        }
    }
}
