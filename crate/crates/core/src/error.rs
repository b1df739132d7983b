//! Crate-wide error type.

/// Errors produced by the design and simulation routines.
///
/// Numerical routines fail loudly instead of returning NaN: a domain
/// violation, a series or iteration that did not converge within its budget,
/// or a root/optimum search that never bracketed a solution.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Input outside the mathematical domain of the routine.
    #[error("domain error: {0}")]
    Domain(String),

    /// Iterative evaluation exhausted its iteration budget.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failure: {0}")]
    Quadrature(String),

    /// A bracketing or optimisation search failed to locate a solution.
    #[error("search failure: {0}")]
    Search(String),

    /// Inconsistent or invalid configuration values.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
