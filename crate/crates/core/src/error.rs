use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("extension degree must be positive")]
    ZeroDegree,

    #[error("field size {p}^{n} exceeds the cap {cap}")]
    FieldTooLarge { p: u64, n: u32, cap: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("zero is not in the multiplicative group")]
    ZeroElement,

    #[error("index {0} is divisible by q-1")]
    ZeroResidue(u64),

    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    #[error("elementary divisors at prime {prime} are ambiguous at precision {precision}")]
    PrecisionAmbiguity { prime: u64, precision: u32 },

    #[error("cannot factor {0} into primes")]
    Factorization(String),

    #[error("computation paths disagree: {0}")]
    PathMismatch(String),

    #[error("block {0} ties between both carry lists and needs the Galois ring to settle")]
    UnresolvedTie(u64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
