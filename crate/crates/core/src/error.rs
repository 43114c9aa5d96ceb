use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid fractional order {0}: must be finite with 0 < nu <= 2")]
    InvalidOrder(f64),

    #[error("order {nu} is outside the {expected} regime required here")]
    WrongRegime { nu: f64, expected: &'static str },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("series did not converge after {terms} terms (last term {last_term:e}); use the decomposition path")]
    NonConvergence { terms: usize, last_term: f64 },

    #[error(
        "decay-kernel denominator root {root} lies within {margin:e} (relative) of the integration path; \
         the order is too close to a pole crossing (e.g. nu = 4/3)"
    )]
    DenominatorSingularity { root: String, margin: f64 },

    #[error("adaptive quadrature failed: estimated error {error:e} exceeds tolerance {tolerance:e} after {intervals} intervals")]
    QuadratureFailure { error: f64, tolerance: f64, intervals: usize },

    #[error("quantity is singular at t = 0 for nu < 1")]
    SingularTime,

    #[error("Laplace contour passes within the safety margin of the pole at {pole}")]
    ContourClash { pole: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
