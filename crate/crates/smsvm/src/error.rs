//! Error type shared by the whole crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building datasets, evaluating losses,
/// or running a solver.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A vector or matrix had the wrong length for the operation.
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// Malformed libSVM input; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A hyperparameter or configuration field failed validation.
    #[error("invalid parameter: {msg}")]
    InvalidParam { msg: String },

    /// A dataset failed its structural invariants.
    #[error("invalid dataset: {msg}")]
    InvalidData { msg: String },

    /// The 1-D piecewise-quadratic problem has no finite minimizer
    /// (`a = 0` and the slope stays negative past the last breakpoint).
    #[error("line-search objective is unbounded below (a = 0 and slope stays negative)")]
    UnboundedBelow,

    /// The line-search problem violated a precondition (zero direction,
    /// negative curvature, non-finite input, ...).
    #[error("invalid line-search problem: {msg}")]
    InvalidLineSearch { msg: String },

    /// Armijo backtracking ran out of halvings without finding decrease.
    #[error(
        "line search stalled at iteration {iter}: no Armijo decrease after {halvings} halvings \
         (step {step:e}, model slope {slope:e})"
    )]
    ArmijoStall {
        iter: usize,
        halvings: usize,
        step: f64,
        slope: f64,
    },

    /// The active-block Newton system could not be factorized.
    /// With `lambda > 0` the block is positive definite, so this signals
    /// `lambda = 0` (or non-finite data) rather than a solver bug.
    #[error("linear solve failed on the active block: {msg}")]
    LinearSolve { msg: String },

    /// An iterate or objective became non-finite.
    #[error("numerical failure at iteration {iter}: {msg}")]
    NumericalFailure { iter: usize, msg: String },

    /// I/O error while reading or writing data files.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
