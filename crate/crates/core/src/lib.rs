//! Time-domain characterization of coupled-resonator structures.
//!
//! The crate has two halves that meet in the middle:
//!
//! * **Analysis** — take raw probe voltages from a transient solver or
//!   measurement, decimate them through anti-aliased stages, isolate the
//!   band of interest with a Gaussian bandpass, and super-resolve the split
//!   resonances with a subspace estimator ([`extraction::extract_coupling`]).
//!   A reflection-based path recovers external quality factors from group
//!   delay ([`extraction::external_q`]).
//! * **Synthesis** — turn low-pass prototype coefficients into coupling
//!   coefficient and external-Q targets ([`synthesis::coupling_targets`]),
//!   and invert monotone simulated design curves back to geometry
//!   ([`synthesis::MonotoneCurve::invert`]).
//!
//! All numerics are generic over the [`Real`] scalar (`f32` or `f64`);
//! the `*64`/`*32` aliases below pick a concrete precision. `f64` is the
//! precision the documented tolerances are stated for.

pub mod dsp;
pub mod error;
pub mod extraction;
pub mod io;
pub mod num;
pub mod signals;
pub mod spectral;
pub mod synthesis;

pub use error::{Error, ModeDiagnostic, Result};
pub use num::Real;

/// Uniformly sampled record in `f64`.
pub type Signal64 = signals::UniformSignal<f64>;
/// Uniformly sampled record in `f32`.
pub type Signal32 = signals::UniformSignal<f32>;
/// Symmetric FIR filter in `f64`.
pub type FirFilter64 = dsp::FirFilter<f64>;
/// Coupling-extraction configuration in `f64`.
pub type KPipelineConfig64 = extraction::KPipelineConfig<f64>;
/// Coupling-extraction result in `f64`.
pub type CouplingResult64 = extraction::CouplingResult<f64>;
/// Reflection spectrum in `f64`.
pub type ReflectionSpectrum64 = extraction::ReflectionSpectrum<f64>;
/// Subspace-estimator configuration in `f64`.
pub type EspritConfig64 = spectral::EspritConfig<f64>;
/// Low-pass filter prototype in `f64`.
pub type FilterPrototype64 = synthesis::FilterPrototype<f64>;
/// Coupling targets in `f64`.
pub type CouplingTargets64 = synthesis::CouplingTargets<f64>;
/// Monotone design curve in `f64`.
pub type MonotoneCurve64 = synthesis::MonotoneCurve<f64>;
/// Debye permittivity model in `f64`.
pub type DebyeModel64 = synthesis::DebyeModel<f64>;
