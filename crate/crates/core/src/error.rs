use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the toolkit can report.
///
/// Variants are grouped by how a caller is expected to react; [`Error::kind`]
/// exposes that grouping so the CLI can map it onto stable exit codes.
#[derive(Debug, Error)]
pub enum Error {
    // quantum register
    #[error("qubit {index} out of range for a {num_qubits}-qubit register")]
    InvalidQubit { index: usize, num_qubits: usize },
    #[error("qubit {0} is used more than once in a single gate")]
    OverlappingQubits(usize),
    #[error("register of {0} qubits is outside the supported range 1..={max}", max = crate::quantum::MAX_QUBITS)]
    UnsupportedQubitCount(usize),
    #[error("invalid quantum state: {0}")]
    InvalidState(String),
    #[error("partial trace needs at least one qubit to keep")]
    EmptyKeepSet,

    // shapes and inputs
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("need at least {needed} vectors, got {found}")]
    TooFewVectors { needed: usize, found: usize },
    #[error("non-finite value in input: {0}")]
    NonFinite(String),
    #[error("training set is not centered (residual mean norm {residual:e})")]
    NotCentered { residual: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),

    // numerical degeneracy
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("readout has no bright/dark contrast (bright {bright}, dark {dark})")]
    NoContrast { bright: f64, dark: f64 },

    // audio
    #[error("unsupported audio format in {path}: {reason}")]
    UnsupportedAudio { path: PathBuf, reason: String },
    #[error("corrupt or truncated audio file {path}: {reason}")]
    CorruptAudio { path: PathBuf, reason: String },
    #[error("no {duration_s} s window clears the silence threshold")]
    NoQualifyingWindow { duration_s: f64 },
    #[error("segment has {found} samples, need at least {needed}")]
    SegmentTooShort { needed: usize, found: usize },

    // files
    #[error("malformed {what}: {reason}")]
    Parse { what: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Coarse classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad arguments or structurally invalid requests.
    Usage,
    /// Input data that is missing, malformed or inconsistent.
    Data,
    /// Mathematically degenerate inputs (zero vectors, zero contrast, ...).
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidQubit { .. }
            | Error::OverlappingQubits(_)
            | Error::UnsupportedQubitCount(_)
            | Error::EmptyKeepSet
            | Error::InvalidInput(_) => ErrorKind::Usage,
            Error::Degenerate(_) | Error::NoContrast { .. } | Error::NotCentered { .. } => {
                ErrorKind::Numerical
            }
            _ => ErrorKind::Data,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            what: what.into(),
            reason: reason.into(),
        }
    }
}
