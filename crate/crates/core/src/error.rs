use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix failed a density-matrix check (dimension, Hermiticity, trace or positivity).
    InvalidDensityMatrix(&'static str),
    DimensionMismatch { expected: usize, found: usize },
    GammaOutOfRange(f64),
    ProbabilityOutOfRange(f64),
    /// A distribution or weight vector does not sum to one.
    NotNormalized(f64),
    /// Single-observable marginals disagree between two experiments sharing the observable.
    InconsistentQuartet { discrepancy: f64 },
    EmptyEnsemble,
    InvalidSampleCount,
    /// A tabulated response was queried at a setting it does not cover.
    UnknownSetting(f64),
    UnknownContext,
    /// A macrostate model does not cover all four measurement contexts.
    IncompleteModel,
    InvalidParameter(&'static str),
    LocalityViolation(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDensityMatrix(why) => write!(f, "invalid density matrix: {why}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::GammaOutOfRange(g) => write!(f, "transmissivity {g} outside [0, 1]"),
            Error::ProbabilityOutOfRange(p) => write!(f, "probability {p} outside [0, 1]"),
            Error::NotNormalized(s) => write!(f, "weights sum to {s}, expected 1"),
            Error::InconsistentQuartet { discrepancy } => write!(
                f,
                "inconsistent quartet: single-observable marginals differ by {discrepancy:e}"
            ),
            Error::EmptyEnsemble => f.write_str("empty ensemble"),
            Error::InvalidSampleCount => f.write_str("sample count must be at least 1"),
            Error::UnknownSetting(r) => write!(f, "response not tabulated at setting {r} rad"),
            Error::UnknownContext => f.write_str("measurement context not present in model"),
            Error::IncompleteModel => f.write_str("model does not cover all four contexts"),
            Error::InvalidParameter(why) => write!(f, "invalid parameter: {why}"),
            Error::LocalityViolation(why) => write!(f, "locality restriction violated: {why}"),
        }
    }
}

impl core::error::Error for Error {}
