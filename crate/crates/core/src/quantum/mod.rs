//! States, density matrices and the metrics computed on them.

mod density;
mod ket;
pub mod linalg;
mod metrics;

pub use density::{BasisLabel, DensityMatrix};
pub use ket::{modes_for, Mode, OamKet, PureState, Spin, SpinKet};
pub use metrics::{
    angular_momentum_expectations, entanglement_entropy, fidelity, partial_trace, trace_distance,
    Subsystem,
};

/// Complex amplitude type used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Default OAM truncation `L`; the experiment lives in `l in {-1, 0, 1}`.
pub const DEFAULT_OAM_TRUNCATION: usize = 1;
/// Largest supported OAM truncation.
pub const MAX_OAM_TRUNCATION: usize = 8;

pub(crate) const NORM_TOLERANCE: f64 = 1e-12;
/// Allowed entrywise deviation from Hermiticity.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
/// Allowed deviation of the trace from one.
pub const TRACE_TOLERANCE: f64 = 1e-10;
/// Eigenvalues in `[-PSD_TOLERANCE, 0)` count as numerical zeros.
pub const PSD_TOLERANCE: f64 = 1e-9;
