//! Path-integral propagation of the free and harmonic Schrödinger equation
//! with a relativistic short-time kernel confined to the light cone.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod io;
pub mod kernel;
pub mod oscillator;
pub mod params;
pub mod propagator;
pub mod quad;
pub mod schrodinger;
pub mod special;
pub mod wave;

pub use error::{Error, Result};
pub use geometry::{ExclusionTriangle, Interval, LightConeGeometry, SupportRegion};
pub use kernel::{CoefficientSample, KernelWeights, Lagrangian};
pub use params::{check_regime, check_regime_with, derive_groups, PhysicalParams, RegimeMargins, RegimeReport};
pub use propagator::{Backend, Propagator, RunOptions, Trajectory};
pub use wave::{InitialData, WaveFunction};
