//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by manifold construction, frame building, cost-model
/// validation, and the Newton solver.
#[derive(Debug, Error)]
pub enum Error {
    /// Incompatible or out-of-range dimensions; the message names the
    /// offending quantities.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A candidate point violates the orthonormality constraint U^T U = I.
    #[error("orthonormality violated: max deviation {deviation:.3e} exceeds tolerance {tol:.3e}")]
    ConstraintViolation { deviation: f64, tol: f64 },

    /// A candidate tangent vector violates skew-symmetry of U^T Delta.
    #[error("tangency violated: max deviation {deviation:.3e} exceeds tolerance {tol:.3e}")]
    TangencyViolation { deviation: f64, tol: f64 },

    /// QR factorization met a diagonal entry of R too small to fix a sign.
    #[error("rank-deficient retraction: |R[{index},{index}]| = {value:.3e} below {tol:.3e}")]
    RankDeficient { index: usize, value: f64, tol: f64 },

    /// No acceptable pivot row remained during pivot-set selection.
    #[error(
        "pivot selection failed at column {col}: best remaining pivot {best:.3e} below {tol:.3e}"
    )]
    PivotFailure { col: usize, best: f64, tol: f64 },

    /// Gram-Schmidt hit a vector with negligible residual norm.
    #[error("degenerate frame: Gram-Schmidt pivot norm {norm:.3e} below {tol:.3e}")]
    DegenerateFrame { norm: f64, tol: f64 },

    /// A matrix required to be symmetric is not.
    #[error("matrix {name} is not symmetric: max asymmetry {deviation:.3e}")]
    NotSymmetric { name: String, deviation: f64 },

    /// Brockett weights violate the required ordering or sign.
    #[error("bad weights: {0}")]
    BadWeights(String),

    /// A user-supplied cost model failed its construction-time self checks.
    #[error("cost model validation failed: {0}")]
    ValidationFailure(String),

    /// Two tangent vectors do not share the same base point.
    #[error("base point mismatch between tangent vectors")]
    BaseMismatch,

    /// An operation that is only meaningful at critical points was invoked
    /// away from the critical set.
    #[error("point is not critical: max residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotCritical { residual: f64, tol: f64 },

    /// The Newton linear system could not be solved, even after
    /// regularization.
    #[error("linear solve failed: {0}")]
    SolveFailure(String),

    /// Eigenvalues are too close for critical-point enumeration to yield a
    /// finite critical set.
    #[error(
        "degenerate spectrum: eigenvalue gap {gap:.3e} between indices {index} and {} is below tolerance {tol:.3e}",
        index + 1
    )]
    DegenerateSpectrum { gap: f64, index: usize, tol: f64 },

    /// A problem-specification file could not be parsed or validated.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
