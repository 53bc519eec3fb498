use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("derivative of order {requested} requested but the field only exposes {available}")]
    DerivDepthExceeded { requested: usize, available: usize },

    #[error("Laurent expansion needs Taylor coefficients up to order {needed}, field exposes {available}")]
    InsufficientDerivativeDepth { needed: usize, available: usize },

    #[error("field is identically zero")]
    IdenticallyZero,

    #[error("could not isolate zeros near theta = {theta}: {reason}")]
    ZeroIsolationFailure { theta: f64, reason: String },

    #[error("map is not a diffeomorphism: min derivative {min_derivative} on the sampling grid")]
    NotDiffeomorphism { min_derivative: f64 },

    #[error("endpoint constraint violated: {0}")]
    EndpointConstraintViolated(String),

    #[error("finite-part regularization did not converge (spread {spread:e})")]
    NonconvergentRegularization { spread: f64 },

    #[error("quadrature did not reach tolerance on [{a}, {b}] (error estimate {error:e})")]
    QuadratureFailure { a: f64, b: f64, error: f64 },

    #[error("ambiguous match: {0}")]
    AmbiguousMatch(String),

    #[error("dimension n = {0} is too small, need n >= 3")]
    DimensionTooSmall(usize),

    #[error("invalid action data: {0}")]
    InvalidActionData(String),

    #[error("inadmissible parameter: {0}")]
    InadmissibleParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
