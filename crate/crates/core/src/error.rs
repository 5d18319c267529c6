use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("x = {x} lies outside the domain [{lo}, {hi}]")]
    DomainError { x: f64, lo: f64, hi: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid rank-frequency function: {0}")]
    InvalidFunction(String),

    #[error("functions are defined on different domains")]
    DomainMismatch,

    #[error("prefix bound {cut} must lie strictly inside ({lo}, {hi})")]
    BadPrefix { cut: f64, lo: f64, hi: f64 },

    #[error("perturbation would leave the set of decreasing non-negative functions: {0}")]
    WouldViolateInvariants(String),

    #[error("operator origin {origin} differs from the function's support start {start}")]
    OriginMismatch { origin: f64, start: f64 },

    #[error("theta must be strictly positive, got {0}")]
    NonPositiveTheta(f64),

    #[error("threshold is not invertible in theta at x = {0}")]
    SingularAbscissa(f64),

    #[error("T(f)(x) = 0 at x = {0}; the corresponding theta is not admissible")]
    ZeroValue(f64),

    #[error("the zero function has no admissible theta range")]
    ZeroFunction,

    #[error("no root for theta = {theta}: theta is not admissible")]
    NoRoot { theta: f64 },

    #[error("equation has {roots} sign changes for theta = {theta}; solution is not unique")]
    NonUnique { theta: f64, roots: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
