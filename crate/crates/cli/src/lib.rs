//! Scenario runner for bathforge: declarative sweeps, figure presets and
//! artifact manifests.

pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod params;
pub mod runner;
pub mod scenarios;

pub use config::{Scale, ScenarioConfig, ScenarioKind, SweepAxis};
pub use error::{CliError, EXIT_ACCEPTANCE, EXIT_NUMERIC, EXIT_OK, EXIT_SCHEMA};
pub use figures::{reproduce, FigureId, FigureOutcome};
pub use runner::{run, RunOutcome, WORKERS_ENV};
