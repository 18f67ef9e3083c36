use thiserror::Error;

/// Errors produced by the estimation toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The mutual coherence matrix is singular where an inverse is required.
    #[error("singular coherence matrix (det = {det:e}); use the degenerate sampling path instead")]
    SingularCoherence { det: f64 },

    /// An outcome probability became negative inside a probability model.
    #[error("probability model returned negative probability {value:e} at outcome {index}")]
    NegativeProbability { index: usize, value: f64 },

    /// Outcome distribution does not sum to one within tolerance.
    #[error("outcome distribution not normalized: total mass {total} (tolerance {tolerance:e})")]
    NotNormalized { total: f64, tolerance: f64 },

    /// Fisher sum diverges: an outcome with vanishing probability has a
    /// non-vanishing derivative.
    #[error("singular support at outcome {index}: P = {probability:e}, |dP| = {derivative:e}")]
    SingularSupport { index: usize, probability: f64, derivative: f64 },

    /// Closed-form Fisher information diverges (deterministic outcome).
    #[error("Fisher information diverges: |Re(g e^-i delta)| = {0}")]
    Divergent(f64),

    /// Malformed record or configuration text.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
