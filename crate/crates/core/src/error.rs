use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("base q = {q} must lie strictly between 0 and 1")]
    InvalidBase { q: f64 },

    #[error("order alpha = {alpha} must exceed -1")]
    InvalidOrder { alpha: f64 },

    #[error("order alpha = {alpha} outside the range {range} required by {operation}")]
    OrderOutOfRange {
        alpha: f64,
        range: &'static str,
        operation: &'static str,
    },

    #[error("denominator parameter {b} hits a pole at index {index}")]
    PoleInDenominator { b: f64, index: usize },

    #[error("series does not converge: {reason}")]
    DivergentSeries { reason: String },

    #[error("argument x must be nonzero for a q-difference quotient")]
    ZeroArgument,

    #[error("upper limit a = {a} of a q-integral must be positive")]
    NonPositiveUpperLimit { a: f64 },

    #[error(
        "integrand magnitude {value} at lattice index {index} exceeds the assumed bound {bound}"
    )]
    SupBoundExceeded {
        index: usize,
        value: f64,
        bound: f64,
    },

    #[error("recurrence undefined at spectral parameter z = 0")]
    ZeroSpectralParameter,

    #[error("zero scan exhausted at z = {z_reached:e} after finding {found} of {requested} zeros")]
    BracketingFailure {
        found: usize,
        requested: usize,
        z_reached: f64,
    },

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("lambda = {lambda} is not a zero (relative residual {residual:e})")]
    NotAZero { lambda: f64, residual: f64 },

    #[error("lattice scales differ: {a} vs {b}")]
    ScaleMismatch { a: f64, b: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("index {index} out of range for table of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("lambda = {lambda} is at a pole (zero of the denominator function)")]
    AtPole { lambda: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("value does not fit in a double: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
