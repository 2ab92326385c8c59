//! Fixed-size linear algebra and seeded sampling.
//!
//! Everything here is sized for dimension four: vectors in R⁴, symmetric
//! 3×3 and 6×6 forms, orthonormal 4-frames. Nothing allocates on the hot
//! paths used by the curvature oracle.

mod eigen;
mod frame;
mod matrix;
mod rng;
mod vector;

pub use eigen::{eig_sym, SymEigen, JACOBI_MAX_SWEEPS, JACOBI_OFFDIAG_TOL};
pub use frame::{gram_schmidt, random_frame4, Frame4, GRAM_SCHMIDT_PIVOT_TOL};
pub use matrix::{Spectrum3, SymMatrix, SymMatrix3, SymMatrix4, SymMatrix6};
pub use rng::{mix_seed, RngStream};
pub use vector::Vector4;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("matrix is not symmetric: entries ({row},{col}) and ({col},{row}) differ by {diff:e}")]
    Asymmetric { row: usize, col: usize, diff: f64 },
    #[error("matrix has a non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },
    #[error("degenerate input: vector {index} is (numerically) in the span of the previous ones")]
    Degenerate { index: usize },
    #[error("Jacobi iteration did not converge in {sweeps} sweeps (off-diagonal norm {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },
}
