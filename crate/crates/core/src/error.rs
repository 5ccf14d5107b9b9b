use thiserror::Error;

/// Errors raised anywhere in the ansatz pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("potential is not symmetric about its minimum: {0}")]
    NotSymmetric(String),
    #[error("potential is not convex: {0}")]
    NotConvex(String),
    #[error("degenerate potential: all coefficients are zero")]
    DegeneratePotential,
    #[error("potential is already shifted")]
    AlreadyShifted,
    #[error("invalid potential parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})")]
    NoConvergence {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },
    #[error("integrand is not finite at x = {0}")]
    NonFiniteIntegrand(f64),
    #[error("argument {0} is outside the domain of the function")]
    DomainError(f64),

    #[error("polynomial basis is ill-conditioned at order {order} (squared norm {norm_sq:e})")]
    IllConditioned { order: usize, norm_sq: f64 },
    #[error("order {order} is out of range (maximum {max})")]
    OrderOutOfRange { order: usize, max: usize },

    #[error("reference energy is zero")]
    DivisionByZero,

    #[error("solver box of half-width {half_width} is too small: level {level} keeps {tail:e} of its norm near the walls")]
    DomainTooSmall {
        half_width: f64,
        level: usize,
        tail: f64,
    },
    #[error("eigensolver failed: {0}")]
    EigensolveFailure(String),
    #[error("grid refinement did not converge: {0}")]
    RefinementFailed(String),

    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::NotSymmetric(_)
                | Error::NotConvex(_)
                | Error::DegeneratePotential
                | Error::AlreadyShifted
                | Error::InvalidParameter(_)
                | Error::OrderOutOfRange { .. }
                | Error::Config(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
