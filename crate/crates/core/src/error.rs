use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole at s = {0}")]
    Pole(Complex64),

    /// The configured caps could not reach the requested accuracy.
    #[error("accuracy error: achieved bound {achieved:.3e}, target {target:.3e}")]
    Accuracy { achieved: f64, target: f64 },

    /// The tracked function (nearly) vanishes on the path.
    #[error("zero on path near s = {at}")]
    ZeroOnPath { at: Complex64 },

    #[error("winding {value} is not within {tolerance} of an integer")]
    NonIntegerWinding { value: f64, tolerance: f64 },

    #[error("winding count mismatch: parent {parent}, children {children}")]
    Additivity { parent: i64, children: i64 },

    #[error("quadrature did not converge: last two estimates {last} and {previous}")]
    Quadrature { last: f64, previous: f64 },

    #[error("scan incomplete: missing bands {missing:?}")]
    IncompleteScan { missing: Vec<(f64, f64)> },

    #[error("configuration mismatch: manifest digest {stored}, current digest {current}")]
    ConfigMismatch { stored: String, current: String },

    #[error("corrupted record at line {line}: {reason}")]
    Corrupt { line: usize, reason: String },

    #[error("scan interrupted after {completed} bands")]
    Interrupted { completed: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Errors that indicate the numerical machinery could not certify a result.
    pub fn is_accuracy(&self) -> bool {
        matches!(
            self,
            Error::Accuracy { .. }
                | Error::NonIntegerWinding { .. }
                | Error::Additivity { .. }
                | Error::Quadrature { .. }
                | Error::ZeroOnPath { .. }
        )
    }
}
