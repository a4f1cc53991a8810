use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method exhausted its budget before meeting tolerance.
    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The moment sequence is too short for the requested order.
    #[error("insufficient moments: need index {needed}, have up to {available}")]
    InsufficientMoments { needed: usize, available: usize },

    /// The first two moments do not describe a nondegenerate law on [0, 1].
    #[error("degenerate moments: {0}")]
    DegenerateMoments(String),

    /// No transmit power can satisfy the reliability constraint.
    #[error("infeasible QoS: {reason} (limiting second moment 1/(1+rho_2) = {limit_mu2})")]
    InfeasibleQos { reason: String, limit_mu2: f64 },

    #[error("realization contains no base station")]
    EmptyRealization,
}
