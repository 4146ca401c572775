//! Polarization optics, the geometric-phase metasurface and SLM projections.

mod gpm;
mod jones;
mod slm;

pub use gpm::{gpm_channel, gpm_unitary, GpmSpec, MEASURED_EFFICIENCY};
pub use jones::{
    hwp, linear_polarizer, polarization_projector_from_waveplates, qwp, rotation, ElementKind,
    PolarizationOperator,
};
pub use slm::{slm_projection_ket, SlmProfile};
