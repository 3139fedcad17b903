use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The phase-plane oval has collapsed to the point `x*`.
    #[error("degenerate oval: alpha = {alpha} is at or beyond alpha*(q) = {alpha_star}; roots merge at x* = {x_star}")]
    Degenerate {
        alpha: f64,
        alpha_star: f64,
        x_star: f64,
    },

    /// A closed-form expression has a vanishing denominator.
    #[error("singularity: {0}")]
    Singularity(String),

    /// An iterative method did not reach its tolerance within budget.
    #[error("no convergence: {0}")]
    NonConvergence(String),

    /// A computed object failed its own consistency check.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    /// A grid could not resolve a sign change.
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
