//! Scenario configuration: parsing and schema validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::params::{schema, Params, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ScenarioKind {
    Spectra,
    Decohere,
    Diagnose,
    Estimate,
    Transfer,
    Cat,
    Rddi,
    Casimir,
    Engine,
    Zeno,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Spectra => "spectra",
            ScenarioKind::Decohere => "decohere",
            ScenarioKind::Diagnose => "diagnose",
            ScenarioKind::Estimate => "estimate",
            ScenarioKind::Transfer => "transfer",
            ScenarioKind::Cat => "cat",
            ScenarioKind::Rddi => "rddi",
            ScenarioKind::Casimir => "casimir",
            ScenarioKind::Engine => "engine",
            ScenarioKind::Zeno => "zeno",
        }
    }

    pub fn uses_randomness(self) -> bool {
        self == ScenarioKind::Estimate
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl SweepAxis {
    pub fn grid(&self) -> Vec<f64> {
        match self.scale {
            Scale::Linear => bathforge::num::linspace(self.start, self.stop, self.points),
            Scale::Log => bathforge::num::logspace(self.start, self.stop, self.points),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub sweep: Vec<SweepAxis>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub plot: bool,
}

/// Largest sweep product a single run accepts.
pub const MAX_POINTS: usize = 1_000_000;

fn schema_error(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Schema { path: path.into(), message: message.into() }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            schema_error(if path == "." { "<root>".to_string() } else { path }, e.into_inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    /// Checks parameter names, types and sweep axes against the kind's schema.
    pub fn validate(&self) -> Result<(), CliError> {
        self.base_params()?;
        let specs = schema(self.kind);
        let mut seen = Vec::new();
        let mut total: usize = 1;
        for (i, axis) in self.sweep.iter().enumerate() {
            let at = |field: &str| format!("sweep[{i}].{field}");
            let Some(spec) = specs.iter().find(|s| s.name == axis.name) else {
                return Err(schema_error(at("name"), format!("`{}` is not a parameter of {}", axis.name, self.kind)));
            };
            if !spec.is_numeric() {
                return Err(schema_error(at("name"), format!("`{}` is not numeric", axis.name)));
            }
            if seen.contains(&axis.name) {
                return Err(schema_error(at("name"), format!("`{}` is swept twice", axis.name)));
            }
            seen.push(axis.name.clone());
            if axis.points == 0 {
                return Err(schema_error(at("points"), "need at least one point"));
            }
            if !axis.start.is_finite() || !axis.stop.is_finite() {
                return Err(schema_error(at("start"), "bounds must be finite"));
            }
            if axis.scale == Scale::Log && !(axis.start > 0.0 && axis.stop > 0.0) {
                return Err(schema_error(at("scale"), "log axes need positive bounds"));
            }
            if spec.is_integer() && axis.grid().iter().any(|v| v.fract() != 0.0) {
                return Err(schema_error(at("points"), format!("`{}` takes integer values only", axis.name)));
            }
            total = total.saturating_mul(axis.points);
        }
        if total > MAX_POINTS {
            return Err(schema_error("sweep", format!("{total} grid points exceed the limit of {MAX_POINTS}")));
        }
        if self.kind.uses_randomness() && self.seed.is_none() {
            return Err(schema_error("seed", format!("{} scenarios need a seed", self.kind)));
        }
        Ok(())
    }

    /// Defaults overlaid with the configured `params` block.
    pub fn base_params(&self) -> Result<Params, CliError> {
        Params::resolve(self.kind, &self.params)
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("configuration serializes");
        hex::encode(Sha256::digest(bytes))
    }

    /// Sweep product in row-major order (first axis outermost).
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let mut points = vec![Vec::new()];
        for axis in &self.sweep {
            let values = axis.grid();
            points = points
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |v| {
                        let mut p = prefix.clone();
                        p.push(*v);
                        p
                    })
                })
                .collect();
        }
        points
    }
}
