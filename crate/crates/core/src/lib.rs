//! Bath-spectrum engineering toolkit.
//!
//! The central quantity is the overlap `R = int F_t(omega) G(omega) domega` of a
//! control filter `F_t` with a bath coupling spectrum `G`. Around it the crate
//! provides bath spectroscopy by filter scanning, Fisher-information parameter
//! estimation, state-transfer fidelity under boundary modulation, collective
//! dephasing of qubit ensembles, band-edge exchange and TEM-line dispersion
//! forces, and a two-bath modulated qubit heat machine.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for `f32`
//! and `f64`); the aliases at the crate root fix `f64`.

// Negated comparisons are how NaN inputs are rejected; matrix kernels index
// several arrays with one loop variable.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod collective;
pub mod engine;
pub mod error;
pub mod estimate;
pub mod filters;
pub mod kk;
pub mod linalg;
pub mod num;
pub mod presets;
pub mod quad;
pub mod solve;
pub mod special;
pub mod spectra;
pub mod transfer;
pub mod waveguide;

pub use error::{Error, Result};
pub use num::Real;

pub type BathSpectrum = spectra::BathSpectrum<f64>;
pub type ThermalBath = spectra::ThermalBath<f64>;
pub type Tabulated = spectra::Tabulated<f64>;
pub type ControlProtocol = filters::ControlProtocol<f64>;
pub type ControlKind = filters::ControlKind<f64>;
pub type FilterFunction = filters::FilterFunction<f64>;
pub type DickeState = collective::DickeState<f64>;
pub type DephasingKernel = collective::DephasingKernel<f64>;
pub type EstimationProblem = estimate::EstimationProblem<f64>;
pub type BathFamily = estimate::BathFamily<f64>;
pub type MachineConfig = engine::MachineConfig<f64>;
pub type MachineOperatingPoint = engine::MachineOperatingPoint<f64>;
pub type Modulation = engine::Modulation<f64>;
pub type BandEdgeConfig = waveguide::BandEdgeConfig<f64>;
pub type TEMLineConfig = waveguide::TEMLineConfig<f64>;
pub type TransferChannel = transfer::TransferChannel<f64, spectra::BathSpectrum<f64>>;
pub type SpectrumEstimate = kk::SpectrumEstimate<f64>;
