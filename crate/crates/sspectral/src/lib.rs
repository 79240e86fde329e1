//! Numerical spectral theory for quaternionic matrices.
//!
//! The crate computes the S-spectrum of a matrix over the quaternions,
//! builds the spectral measure of a normal matrix together with its
//! decomposition `T = A + JB`, evaluates functions of the matrix through
//! several functional calculi, and implements the bounded transform
//! `Z_T = T (I + T*T)^{-1/2}` with a numerically careful inverse.  Every
//! structural identity the theory asserts is also available as a check
//! with an explicit residual.
//!
//! ```
//! use sspectral::calculus::{builtin, calc_continuous};
//! use sspectral::quaternion::{ImaginaryUnit, Quaternion};
//! use sspectral::spectral::{reconstruct, spectral_measure};
//! use sspectral::QMatrix;
//!
//! // diag(e1, 2): one eigensphere at (0, 1), one real eigenvalue at 2.
//! let t = QMatrix::diagonal(&[Quaternion::E1, Quaternion::real(2.0)]);
//! let e = spectral_measure(&t, ImaginaryUnit::DEFAULT)?;
//! assert_eq!(e.atoms.len(), 2);
//!
//! // The measure reconstructs the matrix, and f(T) works through it.
//! assert!(reconstruct(&e).sub(&t).frob_norm() < 1e-12);
//! let sq = calc_continuous(&e, &builtin("sq")?)?;
//! assert!(sq.sub(&t.matmul(&t)).frob_norm() < 1e-12);
//! # Ok::<(), sspectral::Error>(())
//! ```
//!
//! A chapter-by-chapter guide lives in `book/`; its code snippets are
//! compiled and run as part of this crate's test suite.

pub mod calculus;
pub mod cmatrix;
pub mod error;
pub mod qmatrix;
pub mod quaternion;
pub mod random;
pub mod report;
pub mod s_spectrum;
pub mod spectral;
pub mod tol;
pub mod transform;

pub use error::{Error, Result};
pub use qmatrix::QMatrix;
pub use quaternion::{ImaginaryUnit, Quaternion, SlicePoint};
pub use tol::Tolerance;

// Compile and run every Rust snippet in the guide as a doc-test, so the
// book cannot drift from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/quaternions.md")]
    mod quaternions {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/s-spectrum.md")]
    mod s_spectrum {}
    #[doc = include_str!("../../../book/src/spectral-theorem.md")]
    mod spectral_theorem {}
    #[doc = include_str!("../../../book/src/functional-calculus.md")]
    mod functional_calculus {}
    #[doc = include_str!("../../../book/src/bounded-transform.md")]
    mod bounded_transform {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
