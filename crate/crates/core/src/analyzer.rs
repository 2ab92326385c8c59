//! Pinching hypotheses, the isotropic-curvature criterion, and reports.
//!
//! Everything here is pointwise. The hypotheses `K₁⊥ ≥ s/24` and
//! `K₃⊥ ≤ s/6` are meant to hold at every point of a manifold; a report
//! only speaks for the single tensor it was given.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{
    BiorthoSpectrum, CurvatureDecomposition, CurvatureError, CurvatureOperator,
};
use crate::numerics::{mix_seed, Spectrum3};
use crate::oracle::{self, Mode, Objective, OracleConfig, OracleError};
use crate::scalar::Real;

pub const REPORT_FORMAT: &str = "curv4-report-v1";

/// Relative width of the band in which a non-strict inequality still counts
/// as satisfied, scaled by `1 + |s|`.
pub const MARGIN_TOL: f64 = 1e-12;
/// "≈ 0" for classification hints, scaled by `1 + ‖M‖_max`.
pub const HINT_TOL: f64 = 1e-8;
/// Tolerance for the logged identity `min Iso = 2·min(s/6 − w₃±)`.
pub const ISO_IDENTITY_TOL: f64 = 1e-4;
/// Margins smaller than this (times `1 + ‖M‖_max`) are too close to zero
/// for the sampled isotropic minimum to decide their sign.
pub const ISO_SIGN_BAND: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeConfig {
    pub run_oracle: bool,
    pub oracle: OracleConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis<T> {
    pub holds: bool,
    pub margin: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Check<T> {
    /// `K₁⊥ ≥ s/24`, margin `K₁⊥ − s/24`.
    pub hypothesis_a: Hypothesis<T>,
    /// `K₃⊥ ≤ s/6`, margin `s/6 − K₃⊥`.
    pub hypothesis_b: Hypothesis<T>,
    pub scalar_positive: bool,
}

impl<T> Theorem1Check<T> {
    /// True when `s > 0` and at least one pinching hypothesis holds.
    pub fn applies(&self) -> bool {
        self.scalar_positive && (self.hypothesis_a.holds || self.hypothesis_b.holds)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NnicCheck<T> {
    pub holds: bool,
    /// `s/6 − w₃⁺`.
    pub margin_plus: T,
    /// `s/6 − w₃⁻`.
    pub margin_minus: T,
}

impl<T: Real> NnicCheck<T> {
    pub fn min_margin(&self) -> T {
        self.margin_plus.min(self.margin_minus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==")]
    Eq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep<T> {
    pub claim: String,
    pub lhs: T,
    pub relation: Relation,
    pub rhs: T,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AuditOutcome<T> {
    NotApplicable {
        reason: String,
    },
    Chain {
        steps: Vec<ChainStep<T>>,
        all_hold: bool,
    },
}

impl<T> AuditOutcome<T> {
    /// `false` only when a chain was evaluated and some step failed.
    pub fn is_consistent(&self) -> bool {
        match self {
            AuditOutcome::NotApplicable { .. } => true,
            AuditOutcome::Chain { all_hold, .. } => *all_hold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionalExtrema<T> {
    pub min: T,
    pub max: T,
}

/// `K > s/(n(n+2))` with `n = 4`, using the sampled sectional minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjectureCheck<T> {
    pub sectional_min: T,
    pub threshold: T,
    pub margin: T,
    pub holds: bool,
    /// The margin lies inside the tolerance band around zero.
    pub boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsotropicEstimate<T> {
    /// Sampled minimum of the isotropic curvature over frames.
    pub min: T,
    /// `2·min(s/6 − w₃⁺, s/6 − w₃⁻)`.
    pub eigen_prediction: T,
    pub discrepancy: T,
    /// `discrepancy ≤ 1e-4`; logged, not required.
    pub identity_within_tol: bool,
    /// Sign agreement with the eigenvalue criterion, when the margin is
    /// large enough to decide.
    pub sign_agrees: Option<bool>,
}

/// Full diagnostic for one curvature tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinchingReport<T> {
    pub format: String,
    pub tool_version: String,
    pub scalar: T,
    pub bianchi_residual: T,
    pub ricci: [[T; 4]; 4],
    pub wplus: Spectrum3<T>,
    pub wminus: Spectrum3<T>,
    pub spectrum: BiorthoSpectrum<T>,
    pub hypothesis_a: Hypothesis<T>,
    pub hypothesis_b: Hypothesis<T>,
    pub scalar_positive: bool,
    pub nnic: NnicCheck<T>,
    pub audit: AuditOutcome<T>,
    pub sectional_extrema: Option<SectionalExtrema<T>>,
    pub conjecture_check: Option<ConjectureCheck<T>>,
    pub iso_min: Option<IsotropicEstimate<T>>,
    pub classification_hints: Vec<String>,
    pub config: AnalyzeConfig,
    pub notes: Vec<String>,
}

/// Spectral data every check is computed from.
struct Invariants<T> {
    decomposition: CurvatureDecomposition<T>,
    wplus: Spectrum3<T>,
    wminus: Spectrum3<T>,
    spectrum: BiorthoSpectrum<T>,
    scale: T,
}

impl<T: Real> Invariants<T> {
    fn of(op: &CurvatureOperator<T>) -> Result<Self, AnalyzeError> {
        let decomposition = op.decompose();
        Ok(Invariants {
            wplus: decomposition.wplus_spectrum()?,
            wminus: decomposition.wminus_spectrum()?,
            spectrum: op.biortho_spectrum()?,
            decomposition,
            scale: op.max_abs(),
        })
    }

    fn s(&self) -> T {
        self.decomposition.scalar
    }

    fn band(&self) -> T {
        T::tol(MARGIN_TOL) * (T::one() + self.s().abs())
    }

    fn theorem1(&self) -> Theorem1Check<T> {
        let s = self.s();
        let band = self.band();
        let margin_a = self.spectrum.k1 - s / T::lit(24.0);
        let margin_b = s / T::lit(6.0) - self.spectrum.k3;
        Theorem1Check {
            hypothesis_a: Hypothesis {
                holds: margin_a >= -band,
                margin: margin_a,
            },
            hypothesis_b: Hypothesis {
                holds: margin_b >= -band,
                margin: margin_b,
            },
            scalar_positive: s > T::zero(),
        }
    }

    fn nnic(&self) -> NnicCheck<T> {
        let sixth = self.s() / T::lit(6.0);
        let margin_plus = sixth - self.wplus.max();
        let margin_minus = sixth - self.wminus.max();
        let band = self.band();
        NnicCheck {
            holds: margin_plus >= -band && margin_minus >= -band,
            margin_plus,
            margin_minus,
        }
    }

    fn audit(&self) -> AuditOutcome<T> {
        let check = self.theorem1();
        if !check.scalar_positive {
            return AuditOutcome::NotApplicable {
                reason: "scalar curvature is not positive".into(),
            };
        }
        if !check.hypothesis_a.holds && !check.hypothesis_b.holds {
            return AuditOutcome::NotApplicable {
                reason: "neither pinching hypothesis holds".into(),
            };
        }
        let s = self.s();
        let band = self.band();
        let mut steps = Vec::new();
        let mut push = |claim: String, lhs: T, relation: Relation, rhs: T| {
            let holds = match relation {
                Relation::Le => lhs <= rhs + band,
                Relation::Ge => lhs >= rhs - band,
                Relation::Eq => (lhs - rhs).abs() <= band,
            };
            steps.push(ChainStep {
                claim,
                lhs,
                relation,
                rhs,
                holds,
            });
        };
        let twelfth = s / T::lit(12.0);
        let sixth = s / T::lit(6.0);
        let k = &self.spectrum;
        let halves = [
            ("+", &self.wplus, &self.wminus),
            ("-", &self.wminus, &self.wplus),
        ];

        if check.hypothesis_a.holds {
            push("K1 >= s/24".into(), k.k1, Relation::Ge, s / T::lit(24.0));
            let w1sum = self.wplus.min() + self.wminus.min();
            push("w1+ + w1- >= -s/12".into(), w1sum, Relation::Ge, -twelfth);
            for (sign, w, other) in halves {
                push(
                    format!("w1{} <= 0 (traceless)", other_sign(sign)),
                    other.min(),
                    Relation::Le,
                    T::zero(),
                );
                push(
                    format!("w1{sign} >= w1+ + w1-"),
                    w.min(),
                    Relation::Ge,
                    w1sum,
                );
                push(
                    format!("w1{sign} >= -s/12"),
                    w.min(),
                    Relation::Ge,
                    -twelfth,
                );
                push(
                    format!("w3{sign} == -w1{sign} - w2{sign}"),
                    w.max(),
                    Relation::Eq,
                    -w.min() - w.mid(),
                );
                push(
                    format!("-w1{sign} - w2{sign} <= -2 w1{sign}"),
                    -w.min() - w.mid(),
                    Relation::Le,
                    -T::two() * w.min(),
                );
                push(
                    format!("-2 w1{sign} <= s/6"),
                    -T::two() * w.min(),
                    Relation::Le,
                    sixth,
                );
                push(format!("w3{sign} <= s/6"), w.max(), Relation::Le, sixth);
            }
        }
        if check.hypothesis_b.holds {
            push("K3 <= s/6".into(), k.k3, Relation::Le, sixth);
            let w3sum = self.wplus.max() + self.wminus.max();
            push("w3+ + w3- <= s/6".into(), w3sum, Relation::Le, sixth);
            for (sign, w, other) in halves {
                push(
                    format!("w3{} >= 0 (traceless)", other_sign(sign)),
                    other.max(),
                    Relation::Ge,
                    T::zero(),
                );
                push(
                    format!("w3{sign} <= w3+ + w3-"),
                    w.max(),
                    Relation::Le,
                    w3sum,
                );
                push(format!("w3{sign} <= s/6"), w.max(), Relation::Le, sixth);
            }
        }
        let all_hold = steps.iter().all(|s| s.holds);
        AuditOutcome::Chain { steps, all_hold }
    }
}

fn other_sign(sign: &str) -> &'static str {
    if sign == "+" {
        "-"
    } else {
        "+"
    }
}

/// Pinching hypotheses `K₁⊥ ≥ s/24` and `K₃⊥ ≤ s/6` (non-strict, within a
/// band of `1e-12·(1 + |s|)`). Non-positive `s` is reported, not rejected.
pub fn check_theorem1<T: Real>(
    op: &CurvatureOperator<T>,
) -> Result<Theorem1Check<T>, AnalyzeError> {
    Ok(Invariants::of(op)?.theorem1())
}

/// Weyl-eigenvalue test for nonnegative isotropic curvature: `w₃± ≤ s/6`.
pub fn check_nnic<T: Real>(op: &CurvatureOperator<T>) -> Result<NnicCheck<T>, AnalyzeError> {
    Ok(Invariants::of(op)?.nnic())
}

/// Evaluates every inequality in the argument that a pinching hypothesis
/// forces `w₃± ≤ s/6`. A failed step is an internal inconsistency, since
/// each step is an algebraic consequence of the previous ones.
pub fn implication_audit<T: Real>(
    op: &CurvatureOperator<T>,
) -> Result<AuditOutcome<T>, AnalyzeError> {
    Ok(Invariants::of(op)?.audit())
}

/// Advisory pattern matches against the model geometries. "≈ 0" means at
/// most `1e-8·(1 + scale)` where `scale` is the largest block entry of the
/// decomposition.
pub fn classification_hints<T: Real>(
    d: &CurvatureDecomposition<T>,
    spectrum: &BiorthoSpectrum<T>,
) -> Vec<String> {
    let scale = d
        .plus_block()
        .max_abs()
        .max(d.minus_block().max_abs())
        .max(d.mixed_max_abs());
    let eps = T::tol(HINT_TOL) * (T::one() + scale);
    let near = |x: T| x.abs() <= eps;
    let s = d.scalar;
    let wplus_zero = d.wplus.max_abs() <= eps;
    let wminus_zero = d.wminus.max_abs() <= eps;
    let einstein = d.is_einstein(eps);

    let mut hints = Vec::new();
    if wplus_zero && wminus_zero && einstein {
        hints.push(if near(s) {
            "flat: curvature vanishes".to_string()
        } else if s > T::zero() {
            "constant curvature: sphere/space-form quotient family (connected-sum case)".to_string()
        } else {
            "constant negative curvature: hyperbolic space form (outside s > 0)".to_string()
        });
    }
    if wplus_zero && wminus_zero && !einstein {
        let mut ric = d.ricci.eig().map(|e| e.values).unwrap_or([T::nan(); 4]);
        ric.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        if near(ric[0]) && ric[1] > eps && near(ric[3] - ric[1]) {
            hints.push("W ≈ 0, non-Einstein, Ricci rank 3 pattern: ℝ×S³-like (universal cover ℝ × N³ case)".to_string());
        } else {
            hints.push("W ≈ 0, non-Einstein: locally conformally flat".to_string());
        }
    }
    if near(spectrum.k1) && near(spectrum.k2) {
        hints.push("product-of-surfaces signature: K1⊥ = K2⊥ = 0 (reducible case)".to_string());
    }
    if (wplus_zero != wminus_zero) && einstein && s > eps && near(spectrum.k1 - s / T::lit(24.0)) {
        hints.push("CP²-like borderline: half-conformally-flat Einstein with K1⊥ = s/24 (conformal CP² case)".to_string());
    }
    if hints.is_empty() {
        hints.push("no model signature matched".to_string());
    }
    hints
}

/// Runs every check and, when requested, the sampling oracle.
pub fn analyze<T: Real>(
    op: &CurvatureOperator<T>,
    cfg: &AnalyzeConfig,
) -> Result<PinchingReport<T>, AnalyzeError> {
    let inv = Invariants::of(op)?;
    let check = inv.theorem1();
    let nnic = inv.nnic();
    let s = inv.s();
    let band = inv.band();

    let mut notes = vec![
        "pointwise report: the pinching hypotheses concern every point of a manifold; this evaluates one curvature tensor".to_string(),
    ];
    if !check.scalar_positive {
        notes.push("hypotheses are vacuous here: the pinching theorem requires s > 0".to_string());
    }

    let (sectional_extrema, conjecture_check, iso_min) = if cfg.run_oracle {
        let seeded = |k: u64| OracleConfig {
            seed: mix_seed(cfg.oracle.seed, k),
            ..cfg.oracle
        };
        let kmin = oracle::extremize(op, Objective::Sectional, Mode::Min, &seeded(0))?.value;
        let kmax = oracle::extremize(op, Objective::Sectional, Mode::Max, &seeded(1))?.value;
        let threshold = s / T::lit(24.0);
        let margin = kmin - threshold;
        let conjecture = ConjectureCheck {
            sectional_min: kmin,
            threshold,
            margin,
            holds: margin > band,
            boundary: margin.abs() <= band,
        };
        let iso = oracle::min_isotropic(op, &seeded(2))?.value;
        let prediction = T::two() * nnic.min_margin();
        let discrepancy = (iso - prediction).abs();
        let decidable = nnic.min_margin().abs() > T::lit(ISO_SIGN_BAND) * (T::one() + inv.scale);
        let estimate = IsotropicEstimate {
            min: iso,
            eigen_prediction: prediction,
            discrepancy,
            identity_within_tol: discrepancy <= T::lit(ISO_IDENTITY_TOL),
            sign_agrees: decidable.then(|| (iso >= T::zero()) == (nnic.min_margin() >= T::zero())),
        };
        (
            Some(SectionalExtrema {
                min: kmin,
                max: kmax,
            }),
            Some(conjecture),
            Some(estimate),
        )
    } else {
        (None, None, None)
    };

    Ok(PinchingReport {
        format: REPORT_FORMAT.to_string(),
        tool_version: crate::TOOL_VERSION.to_string(),
        scalar: s,
        bianchi_residual: op.bianchi_residual(),
        ricci: *inv.decomposition.ricci.rows(),
        wplus: inv.wplus,
        wminus: inv.wminus,
        spectrum: inv.spectrum,
        hypothesis_a: check.hypothesis_a,
        hypothesis_b: check.hypothesis_b,
        scalar_positive: check.scalar_positive,
        nnic,
        audit: inv.audit(),
        sectional_extrema,
        conjecture_check,
        iso_min,
        classification_hints: classification_hints(&inv.decomposition, &inv.spectrum),
        config: *cfg,
        notes,
    })
}
