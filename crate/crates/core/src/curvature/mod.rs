//! Algebraic curvature tensors in dimension four.
//!
//! A curvature tensor is stored as a symmetric form `M` on the six-dimensional
//! space of 2-forms, in the ordered basis
//! `(e12, e13, e14, e23, e24, e34)`, with the convention
//! `⟨M(u∧v), u∧v⟩ = K(span{u, v})` for orthonormal `u, v`. The unit round
//! sphere is `M = I`.
//!
//! The Hodge star swaps the basis antidiagonally with signs
//! `⋆e12 = e34`, `⋆e13 = −e24`, `⋆e14 = e23`. Its ±1 eigenspaces `Λ±` have
//! orthonormal bases `(e12 ± e34)/√2`, `(e13 ∓ e24)/√2`, `(e14 ± e23)/√2`,
//! and in that basis `M` splits into blocks
//!
//! ```text
//!        Λ+    Λ−
//!  Λ+ [  A     B  ]      A = W⁺ + (s/12)·I
//!  Λ− [  Bᵀ    C  ]      C = W⁻ + (s/12)·I,  B ↔ traceless Ricci
//! ```

mod decomposition;
mod operator;
mod plane;
mod two_form;

pub use decomposition::{BiorthoSpectrum, CurvatureDecomposition};
pub use operator::{BuildOptions, Component, CurvatureOperator, DEFAULT_VALIDATION_TOL};
pub use plane::Plane;
pub use two_form::{pair_index, TwoForm, BASIS_LABELS, PAIRS, PHI_MINUS, PHI_PLUS};

use thiserror::Error;

use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurvatureError {
    #[error("curvature matrix is not symmetric: worst pair ({row},{col}) vs ({col},{row}) differs by {diff:e}")]
    Asymmetric {
        row: &'static str,
        col: &'static str,
        diff: f64,
    },
    #[error("first Bianchi residual {residual:e} exceeds tolerance {tolerance:e} (use Bianchi projection to repair)")]
    BianchiViolation { residual: f64, tolerance: f64 },
    #[error("component R_{i}{j}{k}{l}: indices must lie in 1..=4")]
    IndexOutOfRange {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
    },
    #[error("component R_{i}{j}{k}{l} = {found} conflicts with the value {expected} implied by earlier entries")]
    SymmetryConflict {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
        expected: f64,
        found: f64,
    },
    #[error("vectors are not orthonormal (defect {defect:e})")]
    NonOrthonormal { defect: f64 },
    #[error("internal consistency check failed: {what} (discrepancy {discrepancy:e})")]
    InternalConsistency {
        what: &'static str,
        discrepancy: f64,
    },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
