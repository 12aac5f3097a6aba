use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
    #[error("{func} is undefined at {arg}")]
    Domain { func: &'static str, arg: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{what} is not available for this coefficient")]
    Unavailable { what: String },
    #[error("x = {x} lies outside the grid span [{lo}, {hi}]")]
    OutOfSpan { x: f64, lo: f64, hi: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid initial value problem: {0}")]
    InvalidIvp(String),
    #[error("step size underflow at x = {x} (h = {h}); the coefficients are likely singular here")]
    StepUnderflow { x: f64, h: f64 },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
    #[error("non-finite value encountered at x = {x}")]
    NonFinite { x: f64 },
    #[error("{what} vanishes at x = {x}")]
    Vanishes { what: &'static str, x: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("every sample was masked; the run is degenerate")]
    Degenerate,
    #[error("unknown case `{0}`")]
    UnknownCase(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Failures of the numerics themselves (as opposed to malformed input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::DivisionByZero
                | Error::OutOfSpan { .. }
                | Error::StepUnderflow { .. }
                | Error::TooManySteps(_)
                | Error::NonFinite { .. }
                | Error::Vanishes { .. }
                | Error::Degenerate
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
