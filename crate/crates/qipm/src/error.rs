//! Crate-wide error type.

use crate::refine::RefineTrace;

/// Errors surfaced by solver and harness entry points.
///
/// Numerical failure modes carry enough context to be reported without
/// re-running: non-convergence keeps the residual trace, positivity loss
/// keeps the iteration index, rounding failures keep the attempted
/// partition.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("operation requires integer problem data")]
    NonIntegerData,

    #[error("{what} must be strictly positive")]
    NotStrictlyPositive { what: &'static str },

    #[error("matrix is rank deficient (estimated rank {rank}, expected {expected})")]
    RankDeficient { rank: usize, expected: usize },

    #[error("singular system in {context}")]
    Singular { context: &'static str },

    #[error("right-hand side is identically zero; apply the skip rule instead of solving")]
    ZeroRhs,

    #[error(
        "iterative solve did not converge: {} iterations, final relative residual {:.3e}",
        trace.iterations(),
        trace.final_relative_residual()
    )]
    NonConvergence { trace: Box<RefineTrace> },

    #[error("slack positivity lost at iteration {iteration}")]
    PositivityLoss { iteration: usize },

    #[error("could not find a barrier parameter with proximity below 1/2 (best {best_delta:.3e})")]
    CenteringFailed { best_delta: f64 },

    #[error("start point is not strictly dual feasible: {0}")]
    InfeasibleStart(String),

    #[error("rounding failed: {reason} (basic {basic:?}, nonbasic {nonbasic:?})")]
    RoundingFailed {
        reason: String,
        basic: Vec<usize>,
        nonbasic: Vec<usize>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
