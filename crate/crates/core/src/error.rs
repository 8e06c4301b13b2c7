use core::fmt;

/// Errors raised by instance validation and the solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    EmptyLengths,
    /// An interval length that is not a finite positive number.
    InvalidLength {
        index: usize,
        value: f64,
    },
    MeanOutOfRange {
        mu: f64,
        total: f64,
    },
    NonFinite(&'static str),
    InvalidTau {
        index: usize,
        value: f64,
        bound: f64,
    },
    LengthMismatch {
        expected: usize,
        found: usize,
    },
    InvalidArgument(&'static str),
    TooManyVariables {
        n: usize,
        max: usize,
    },
    /// A root or minimizer could not be bracketed; carries the last interval probed.
    BracketFailure {
        lo: f64,
        hi: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyLengths => write!(f, "interval length vector is empty"),
            Error::InvalidLength { index, value } => {
                write!(
                    f,
                    "interval length #{index} must be finite and positive, got {value}"
                )
            }
            Error::MeanOutOfRange { mu, total } => {
                write!(f, "mean {mu} is outside [0, {total}]")
            }
            Error::NonFinite(what) => write!(f, "{what} must be finite"),
            Error::InvalidTau {
                index,
                value,
                bound,
            } => {
                write!(f, "tau #{index} = {value} is outside [0, {bound}]")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "expected {expected} entries, found {found}")
            }
            Error::InvalidArgument(msg) => f.write_str(msg),
            Error::TooManyVariables { n, max } => {
                write!(f, "{n} variables exceeds the enumeration limit of {max}")
            }
            Error::BracketFailure { lo, hi } => {
                write!(
                    f,
                    "failed to bracket a solution, last interval [{lo}, {hi}]"
                )
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
