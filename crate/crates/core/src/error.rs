use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A structural problem with a `NetworkConfig`.
    InvalidConfig(String),
    /// A mode label referenced a receiver index outside `1..=n_receivers`.
    ModeOutOfRange { index: usize, n_receivers: usize },
    /// Negative time handed to a propagator.
    InvalidTime(f64),
    /// A time grid that is not strictly increasing from zero.
    BadGrid(String),
    /// Qubit normalization at or below the degeneracy threshold.
    DegenerateQubit { normalization: f64 },
    /// No receiver population peak above the detection floor within the horizon.
    NoTransferPeak { max_population: f64, floor: f64 },
    /// Truncated Fock space would exceed the configured dimension limit.
    DimensionGuard { dim: u64, limit: u64 },
    /// Coherent-state truncation discards more weight than allowed.
    ExcessiveTruncation { weight: f64, limit: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidConfig(msg) => write!(f, "invalid network config: {msg}"),
            Error::ModeOutOfRange { index, n_receivers } => {
                write!(f, "receiver index {index} out of range (N = {n_receivers})")
            }
            Error::InvalidTime(t) => write!(f, "propagation time must be >= 0, got {t}"),
            Error::BadGrid(msg) => write!(f, "bad time grid: {msg}"),
            Error::DegenerateQubit { normalization } => {
                write!(f, "degenerate qubit: normalization {normalization} below threshold")
            }
            Error::NoTransferPeak { max_population, floor } => write!(
                f,
                "no transfer peak: max receiver population {max_population} below floor {floor} \
                 (horizon too short or non-selective parameters)"
            ),
            Error::DimensionGuard { dim, limit } => {
                write!(f, "Fock space dimension {dim} exceeds limit {limit}")
            }
            Error::ExcessiveTruncation { weight, limit } => {
                write!(f, "coherent-state truncation weight {weight} exceeds {limit}")
            }
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
