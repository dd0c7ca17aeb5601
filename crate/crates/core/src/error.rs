use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate slope {p}/{q}: integer slopes give fixed-point dynamics (use a constant coupling instead)")]
    DegenerateSlope { p: i64, q: i64 },
    #[error("slope {0} is outside the open interval (0, 1)")]
    SlopeOutOfRange(String),
    #[error("denominator must be positive, got {0}")]
    NonPositiveDenominator(i64),
    #[error("operation requires an irrational slope")]
    RationalSlope,
    #[error("operation requires a rational slope")]
    IrrationalSlope,
    #[error("enumeration budget exceeded: {detail}")]
    EnumerationBudget { detail: String },
    #[error("step budget exceeded: requested {requested}, budget {budget}")]
    BudgetExceeded { requested: u64, budget: u64 },
    #[error("quadrature did not converge on [{a}, {b}]")]
    QuadratureNonConvergence { a: f64, b: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
