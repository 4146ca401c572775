use std::fmt;

/// A failure carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

/// Exit code for numerical or convergence failures.
pub const NUMERICAL: i32 = 1;
/// Exit code for bad arguments, configs or input files.
pub const USAGE: i32 = 2;

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: USAGE,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError {
            code: NUMERICAL,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<spinorbit::Error> for CliError {
    fn from(e: spinorbit::Error) -> Self {
        use spinorbit::Error as E;
        match e {
            E::NotHermitian { .. }
            | E::TraceNotUnit { .. }
            | E::NotPositive { .. }
            | E::SingularSystem
            | E::ZeroNorm => CliError::numerical(e.to_string()),
            E::Io(io) => CliError::usage(format!("I/O error: {io}")),
            other => CliError::usage(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
