//! Pointwise curvature analysis for oriented Riemannian 4-manifolds.
//!
//! The crate works with algebraic curvature tensors at a single point,
//! stored as symmetric forms on 2-forms ([`curvature`]). It splits them into
//! scalar, Ricci and self-dual/anti-self-dual Weyl parts, computes the
//! biorthogonal curvature spectrum `K₁⊥ ≤ K₂⊥ ≤ K₃⊥` in closed form, and
//! cross-checks it against a sampling-and-refinement search over 2-planes
//! ([`oracle`]). [`analyzer`] evaluates the scalar-curvature pinching
//! hypotheses `K₁⊥ ≥ s/24` and `K₃⊥ ≤ s/6` together with the Weyl-eigenvalue
//! test for nonnegative isotropic curvature.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar type for the common cases.

// Tolerance checks are written as `!(x <= tol)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Small fixed-size matrix kernels read better with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod analyzer;
pub mod cli;
pub mod curvature;
pub mod io;
pub mod models;
pub mod numerics;
pub mod oracle;
mod scalar;

pub use scalar::Real;

pub use analyzer::{
    analyze, check_nnic, check_theorem1, classification_hints, implication_audit, AnalyzeConfig,
    PinchingReport,
};
pub use curvature::{
    BiorthoSpectrum, BuildOptions, Component, CurvatureDecomposition, CurvatureError,
    CurvatureOperator, Plane, TwoForm,
};
pub use models::ModelSpec;
pub use numerics::{Frame4, RngStream, Spectrum3, SymMatrix3, SymMatrix6, Vector4};
pub use oracle::{ExtremumResult, OracleConfig};

/// Version string recorded in report files.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub type CurvatureOperatorF64 = CurvatureOperator<f64>;
pub type CurvatureOperatorF32 = CurvatureOperator<f32>;
pub type DecompositionF64 = CurvatureDecomposition<f64>;
pub type DecompositionF32 = CurvatureDecomposition<f32>;
pub type BiorthoSpectrumF64 = BiorthoSpectrum<f64>;
pub type BiorthoSpectrumF32 = BiorthoSpectrum<f32>;
pub type PlaneF64 = Plane<f64>;
pub type PlaneF32 = Plane<f32>;
pub type Vector4F64 = Vector4<f64>;
pub type Frame4F64 = Frame4<f64>;
pub type PinchingReportF64 = PinchingReport<f64>;
pub type PinchingReportF32 = PinchingReport<f32>;
pub type ExtremumResultF64 = ExtremumResult<f64>;
