//! Density-matrix reconstruction from the 16 tomographic count records.
//!
//! [`linear_inversion`] solves the measurement equations directly and serves
//! as a fast, independent cross-check. [`mle_reconstruct`] fits a
//! Cholesky-parametrized physical state to the counts under a Gaussian
//! approximation of the Poisson likelihood.

mod cholesky;
mod cost;
mod linear;
mod mle;
mod model;
pub mod optimize;
mod result;

pub use cholesky::CholeskyParams;
pub use cost::{CountCost, COUNT_FLOOR};
pub use linear::{linear_inversion, NON_PHYSICAL_TOLERANCE};
pub use mle::{mle_reconstruct, MleInit, MleOptions};
pub use model::CountsTable;
pub use result::{fidelity_report, TomographyMethod, TomographyResult};
