//! Error type shared by the whole library.

use thiserror::Error;

/// Errors reported by constructors, solvers and calculi.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A vector or matrix had an unexpected dimension.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A quaternion expected to be a unit imaginary was not.
    #[error("not a unit imaginary quaternion: |re| = {re_abs:.3e}, |q| = {norm:.6}")]
    NotImaginaryUnit { re_abs: f64, norm: f64 },

    /// Division by a quaternion of negligible magnitude.
    #[error("division by zero quaternion")]
    ZeroDivision,

    /// An operation required a Hermitian operator.
    #[error("operator is not self-adjoint: residual {residual:.3e} exceeds {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    /// An operation required an anti-self-adjoint operator.
    #[error("operator is not anti-self-adjoint: residual {residual:.3e} exceeds {tol:.3e}")]
    NotAntiHermitian { residual: f64, tol: f64 },

    /// An operation required a unitary operator.
    #[error("operator is not unitary: residual {residual:.3e} exceeds {tol:.3e}")]
    NotUnitary { residual: f64, tol: f64 },

    /// An operation required a normal operator.
    #[error("operator is not normal: commutator norm {residual:.3e} exceeds {tol:.3e}")]
    NotNormal { residual: f64, tol: f64 },

    /// An operation required a positive operator.
    #[error("operator is not positive: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    /// A linear system or inversion hit a negligible pivot.
    #[error("singular operator encountered in {context}")]
    Singular { context: &'static str },

    /// The iterative eigensolver hit its iteration cap.
    #[error("eigensolver failed to converge within {iterations} iterations")]
    EigensolverFailure { iterations: usize },

    /// A 2n-square complex matrix did not have the block symmetry of a
    /// quaternionic adjoint representation.
    #[error("complex matrix lacks quaternionic block symmetry: residual {residual:.3e}")]
    NotQuaternionic { residual: f64 },

    /// A function failed the slice symmetry check (alpha even, beta odd).
    #[error("slice function violates even/odd symmetry at (u, v) = ({u:.6}, {v:.6}): residual {residual:.3e}")]
    InvalidSliceFunction { u: f64, v: f64, residual: f64 },

    /// A function value or evaluation point was outside the admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Supports of a simple function overlapped or referenced unknown atoms.
    #[error("invalid support: {0}")]
    InvalidSupport(String),

    /// Inversion of a function with a zero value on an atom of nonzero mass.
    #[error("function vanishes on atom {atom_index} carrying a nonzero projection")]
    NotInvertible { atom_index: usize },

    /// Input text could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// An internal cross-check failed; indicates a bug or a severely
    /// ill-conditioned input.
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

/// Convenient result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
