//! Metasurface layout, geometric-phase masks and scalar Fourier optics.
//!
//! Lengths are in nanometres throughout. Grids are square with pixel centres
//! at `(i - n/2 + 0.5) * pitch`, so no pixel sits on the optical axis.

mod fourier;
mod layout;
mod mask;
pub mod pgm;

pub use fourier::{
    far_field, near_field, oam_spectrum, oam_spectrum_of_samples, Beam, ComplexGrid, IntensityGrid,
    OamSpectrum,
};
pub use layout::{
    generate_layout, orientation_field, write_layout_csv, LayoutSpec, Rod, LAYOUT_CSV_HEADER,
    ROD_LENGTH_FRACTION,
};
pub use mask::{phase_mask, MaskKind, PhaseMask, DEFAULT_GRID, MIN_GRID, PADDING_FILL};
