//! Error types shared across the solver.

use thiserror::Error;

/// Errors from differentiation-weight construction.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    /// A 2P-point stencil can differentiate at most 2P-1 times.
    #[error("derivative order {k} too high for a {n_nodes}-point stencil")]
    DerivativeOrderTooHigh { k: usize, n_nodes: usize },
}

/// Errors from the exact Riemann solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RiemannError {
    /// The data generate vacuum; no admissible star state exists.
    #[error("pressure positivity condition violated: data generate vacuum")]
    VacuumGenerated,
    /// Newton iteration on the star pressure failed to converge.
    #[error(
        "star-pressure iteration did not converge after {iterations} steps (residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },
}

/// Errors from time-step computation and the solver driver.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("maximum wave speed is not finite")]
    NonFiniteWaveSpeed,
    #[error(
        "solver diverged: {failing} of {total} cells still non-finite at the last cascade level"
    )]
    SolverDiverged { failing: usize, total: usize },
    #[error("scheme requires an exact-state provider but the test case has none")]
    MissingExactState,
    #[error(transparent)]
    Riemann(#[from] RiemannError),
    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
