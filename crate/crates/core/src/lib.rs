//! Simulation of single-photon spin/orbital-angular-momentum entanglement
//! produced by a geometric-phase metasurface, together with the tomography
//! chain used to verify it.
//!
//! The crate is split by concern:
//!
//! * [`quantum`] holds kets, density matrices and the metrics built on them
//!   (fidelity, partial trace, entanglement entropy).
//! * [`optics`] holds Jones-calculus waveplates, the metasurface operator and
//!   the SLM projection kets.
//! * [`experiment`] assembles the 16-setting measurement and simulates
//!   coincidence counts.
//! * [`tomography`] reconstructs density matrices by linear inversion and
//!   maximum likelihood.
//! * [`design`] lays out the nanoantennas, renders phase masks and checks
//!   the imprinted OAM by Fourier optics.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// `is_multiple_of` is newer than the supported toolchain.
#![allow(clippy::manual_is_multiple_of)]

pub mod design;
mod error;
pub mod experiment;
pub mod optics;
pub mod quantum;
pub mod tomography;

pub use error::{Error, Result};

pub use experiment::{
    BellState, CountRecord, ExperimentConfig, MeasurementSetting, NoiseModel, SourcePolarization,
};
pub use optics::{GpmSpec, PolarizationOperator, SlmProfile};
pub use quantum::{BasisLabel, DensityMatrix, Mode, OamKet, PureState, Spin, SpinKet, C64};
pub use tomography::{TomographyMethod, TomographyResult};
