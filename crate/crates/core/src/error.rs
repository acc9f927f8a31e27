use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the simulator, estimator, or persistence layer.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("incidence angle {incidence} rad is outside the field of view (half-power semi-angle {half_angle} rad)")]
    OutOfFieldOfView { incidence: f64, half_angle: f64 },

    /// A parameter set violates a type invariant.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("unstable filter `{label}`: largest pole modulus {max_pole_modulus}")]
    UnstableFilter { label: String, max_pole_modulus: f64 },

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("band {low_bpm}-{high_bpm} BPM contains no FFT bin")]
    EmptyBand { low_bpm: f64, high_bpm: f64 },

    #[error("trace has {samples} samples, fewer than one window of {window}")]
    TraceTooShort { samples: usize, window: usize },

    /// Non-finite values appeared during processing (e.g. an unstable filter run under override).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end.
    ///
    /// 1 validation, 2 I/O, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            Error::UnstableFilter { .. } | Error::Numerical(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
