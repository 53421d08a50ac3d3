use thiserror::Error;

/// Crate-wide error type.
///
/// The variants map onto the process exit codes used by the `scalesym`
/// binary: `Config` exits with 2, a failed scenario check with 1, and
/// everything else here (bad call, domain violation, integrator breakdown,
/// I/O) with 3.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on a call was violated (mismatched dimensions,
    /// trajectory/system mismatch, out-of-range argument, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// The requested evaluation left the mathematical domain of the model,
    /// e.g. a singular potential evaluated at the origin.
    #[error("domain error: {0}")]
    Domain(String),

    /// The adaptive integrator could not continue. `t_reached` and
    /// `last_state` hold the last accepted step so callers can inspect how
    /// far the run got.
    #[error("integration error at t = {t_reached}: {message}")]
    Integration {
        message: String,
        t_reached: f64,
        last_state: Vec<f64>,
    },

    /// Scenario configuration could not be parsed or validated.
    #[error("config error{}: {message}", position_suffix(line, column))]
    Config {
        message: String,
        line: Option<usize>,
        column: Option<usize>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config {
            message: msg.into(),
            line: None,
            column: None,
        }
    }

    pub fn config_at(msg: impl Into<String>, line: usize, column: usize) -> Self {
        Error::Config {
            message: msg.into(),
            line: Some(line),
            column: Some(column),
        }
    }

    /// Process exit code the `scalesym` binary uses for this error:
    /// 2 for configuration problems, 3 for everything else. (A scenario
    /// whose checks fail exits with 1, but that is not an `Error`.)
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            _ => 3,
        }
    }
}

fn position_suffix(line: &Option<usize>, column: &Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" at line {l}, column {c}"),
        (Some(l), None) => format!(" at line {l}"),
        _ => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
