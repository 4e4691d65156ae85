//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed its precondition (dimension, range, shape).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A point lies outside the closure of the domain it was used with.
    #[error("point {point:?} is outside the domain ({context})")]
    OutsideDomain { point: Vec<f64>, context: String },

    /// The requested quantity needs derivative data the field does not provide.
    #[error("field does not provide {0}")]
    MissingDerivatives(&'static str),

    /// An iterative or adaptive procedure stopped before reaching its target
    /// accuracy. The achieved estimate is reported so callers can decide
    /// whether the partial result is usable.
    #[error("no convergence in {what}: achieved {achieved:e}, wanted {wanted:e}")]
    NoConvergence {
        what: String,
        achieved: f64,
        wanted: f64,
    },

    /// A linear system could not be solved (singular factorization).
    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    /// Barrier certification failed: no parameter choice in the search grid
    /// satisfied the required inequality on the sample.
    #[error("certification failed: {0}")]
    Certification(String),

    /// The operation is not implemented for the given domain kind.
    #[error("unsupported domain for {op}: {domain}")]
    UnsupportedDomain { op: &'static str, domain: String },
}

pub type Result<T> = std::result::Result<T, Error>;
