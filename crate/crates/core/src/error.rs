use thiserror::Error;

/// Errors raised by constructors and numerical routines.
///
/// Invariant violations name the invariant they break, so that file readers
/// can report exactly why an input was rejected.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invariant violated: hermiticity (max |a_ij - conj(a_ji)| = {max_asymmetry:e})")]
    NotHermitian { max_asymmetry: f64 },

    #[error("invariant violated: unit trace (trace = {trace})")]
    TraceNotOne { trace: f64 },

    #[error("invariant violated: zero trace (trace = {trace:e})")]
    NotTraceless { trace: f64 },

    #[error("invariant violated: strict positivity (smallest eigenvalue = {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invariant violated: trace preservation (max |sum K^dagger K - I| = {residual:e})")]
    NotTracePreserving { residual: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("eigen-solver did not converge for a {dim}x{dim} matrix")]
    EigenNoConvergence { dim: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("finite-difference step {step:e} leaves the positive cone; try step <= {suggested:e}")]
    StepTooLarge { step: f64, suggested: f64 },

    #[error("alpha is undefined: g''(1) = 0 for `{0}`")]
    UndefinedAlpha(String),

    #[error("unknown {kind} `{name}`; expected one of: {known}")]
    Unknown {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error("path sample at t = {t} is not a density matrix: {reason}")]
    PathSample { t: f64, reason: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
