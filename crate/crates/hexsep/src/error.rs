//! Error type shared by all hexsep modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Constellation order outside the supported set.
    #[error("unsupported constellation order M = {0} (supported: 3, 4, 8, 16, ..., 2048)")]
    UnsupportedOrder(usize),

    /// No documented or symmetric point selection exists for this order/kind.
    #[error("no symmetric constellation shape available for M = {order}")]
    ShapeUnavailable { order: usize },

    /// Doubling the quadrature order kept changing the result by more
    /// than the requested tolerance.
    #[error(
        "quadrature did not converge: |delta| = {achieved:e} > tol = {requested:e} at {nodes} nodes"
    )]
    QuadratureNotConverged {
        requested: f64,
        achieved: f64,
        nodes: usize,
    },

    /// Adaptive integration ran out of subdivision budget before reaching
    /// the target error bound.
    #[error("integration budget exceeded: error bound {error_bound:e} > target {target:e}")]
    IntegrationBudgetExceeded { error_bound: f64, target: f64 },

    /// Input outside the mathematical domain of an expression.
    #[error("domain error: {0}")]
    DomainError(String),

    /// Simulation configuration violates a precondition.
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    /// Two tables or sweeps that must share an SNR grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
