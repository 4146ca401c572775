//! The measurement apparatus: Bell-state preparation through the
//! metasurface, the 16 tomographic settings and coincidence-count simulation.

mod bell;
mod counts;
mod settings;
mod sim;

pub use bell::{BellState, BLOCK_MODES};
pub use counts::{read_counts_csv, write_counts_csv, CountRecord, COUNTS_CSV_HEADER};
pub use settings::{standard_measurement_set, MeasurementSetting, PolarizationLabel};
pub use sim::{
    expected_probability, prepare_source_state, run_bell_pipeline, simulate_counts, BellRun,
    ExperimentConfig, NoiseModel, SourcePolarization, NOMINAL_COINCIDENCES,
};

/// Labels of the `l = +-1` block in storage order.
pub fn block_labels() -> Vec<crate::quantum::BasisLabel> {
    BLOCK_MODES
        .iter()
        .copied()
        .map(crate::quantum::BasisLabel::Mode)
        .collect()
}
