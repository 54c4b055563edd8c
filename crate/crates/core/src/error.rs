use thiserror::Error;

use crate::pgr::PgrReport;
use crate::series::Exponent;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The divisor is the exact zero series.
    #[error("division by zero")]
    DivisionByZero,

    /// A value is zero up to its truncation order, so a leading term or sign
    /// cannot be decided at the working precision.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("negative valuation {0} has no residue")]
    NegativeValuation(Exponent),

    #[error("denominator polynomial is zero")]
    ZeroDenominator,

    #[error("series with ramification index {found} cannot be coarsened by {factor}")]
    IncompatibleRamification { found: u32, factor: u32 },

    #[error("coefficients have a common factor (resultant vanishes)")]
    DegenerateMap,

    #[error("all coefficients are zero")]
    AllZero,

    #[error("conjugation matrix is singular")]
    SingularMatrix,

    #[error("expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sample n = {n} hits a pole of a coefficient")]
    SampleUndefined { n: u32 },

    #[error("search inconclusive after {} probes", .0.probes)]
    Inconclusive(Box<PgrReport>),
}

impl Error {
    pub(crate) fn precision(msg: impl Into<String>) -> Self {
        Error::PrecisionExhausted(msg.into())
    }
}
