use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state has zero norm and cannot be normalized")]
    ZeroNorm,

    #[error("OAM truncation {requested} exceeds the supported maximum {max}")]
    TruncationTooLarge { requested: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("density matrices are expressed in different bases")]
    BasisMismatch,

    #[error("basis is not a spin x OAM product basis")]
    NotProductBasis,

    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace {trace} differs from 1")]
    TraceNotUnit { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("OAM index {oam} shifted by {shift} leaves the truncated range [-{l_max}, {l_max}]")]
    OamOverflow { oam: i32, shift: i32, l_max: usize },

    #[error("state carries weight {weight:e} outside the l = +-1 block")]
    SupportOutsideBlock { weight: f64 },

    #[error("orientation is undefined at the exact origin")]
    SingularOrigin,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("setting {0} has no projector")]
    NoProjector(u8),

    #[error("counts file is missing setting {0}")]
    MissingSetting(u8),

    #[error("counts file lists setting {0} more than once")]
    DuplicateSetting(u8),

    #[error("reference intensity (setting 0) must have positive counts")]
    EmptyReference,

    #[error("linear inversion system is singular")]
    SingularSystem,

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("sampling circle of radius {radius_nm} nm exits the grid")]
    CircleOutsideGrid { radius_nm: f64 },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
