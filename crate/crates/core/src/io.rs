//! On-disk formats: `curv4-v1` tensor files and the JSON records written
//! by the command-line tool.
//!
//! Floats are written by `serde_json` in shortest round-trip form and parsed
//! exactly, so a tensor written and read back is bitwise identical.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{
    BuildOptions, Component, CurvatureError, CurvatureOperator, BASIS_LABELS, PAIRS,
};
use crate::models::ModelError;

pub const TENSOR_FORMAT: &str = "curv4-v1";
pub const SIGN_CONVENTION: &str = "K(ei,ej)=R(ij,ij)";
pub const STAR_CONVENTION: &str = "antidiagonal signed";
pub const SCAN_FORMAT: &str = "curv4-scan-v1";
pub const VERIFY_FORMAT: &str = "curv4-verify-v1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed tensor file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("tensor file schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Convention {
    pub basis: Vec<String>,
    pub sign: String,
    pub star: String,
}

impl Default for Convention {
    fn default() -> Self {
        Convention {
            basis: BASIS_LABELS.iter().map(|s| s.to_string()).collect(),
            sign: SIGN_CONVENTION.to_string(),
            star: STAR_CONVENTION.to_string(),
        }
    }
}

/// A `curv4-v1` tensor file. Exactly one of `matrix` (6×6, row-major, in
/// the basis order of `convention.basis`) and `components`
/// (`[i, j, k, l, value]` with 1-based indices) is present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub format: String,
    pub convention: Convention,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<[[f64; 6]; 6]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<[f64; 5]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

impl TensorFile {
    pub fn from_matrix(op: &CurvatureOperator<f64>, meta: Option<serde_json::Value>) -> Self {
        TensorFile {
            format: TENSOR_FORMAT.to_string(),
            convention: Convention::default(),
            matrix: Some(op.rows()),
            components: None,
            meta,
        }
    }

    /// Lists `R_ijkl` for `i<j`, `k<l`, `(ij) ≤ (kl)`, skipping zeros.
    pub fn from_components(op: &CurvatureOperator<f64>, meta: Option<serde_json::Value>) -> Self {
        let m = op.matrix();
        let mut list = Vec::new();
        for a in 0..6 {
            for b in a..6 {
                let v = m.get(a, b);
                if v != 0.0 {
                    let (i, j) = PAIRS[a];
                    let (k, l) = PAIRS[b];
                    list.push([
                        (i + 1) as f64,
                        (j + 1) as f64,
                        (k + 1) as f64,
                        (l + 1) as f64,
                        v,
                    ]);
                }
            }
        }
        TensorFile {
            format: TENSOR_FORMAT.to_string(),
            convention: Convention::default(),
            matrix: None,
            components: Some(list),
            meta,
        }
    }

    /// Schema checks, then symmetry and Bianchi validation per `opts`.
    pub fn to_operator(&self, opts: BuildOptions<f64>) -> Result<CurvatureOperator<f64>, IoError> {
        if self.format != TENSOR_FORMAT {
            return Err(IoError::Schema(format!(
                "format is '{}', expected '{TENSOR_FORMAT}'",
                self.format
            )));
        }
        if self.convention != Convention::default() {
            return Err(IoError::Schema(format!(
                "unsupported convention {:?}; expected basis {:?}, sign '{SIGN_CONVENTION}', star '{STAR_CONVENTION}'",
                self.convention, BASIS_LABELS
            )));
        }
        match (&self.matrix, &self.components) {
            (Some(m), None) => Ok(CurvatureOperator::from_matrix(*m, opts)?),
            (None, Some(list)) => {
                let entries = list
                    .iter()
                    .map(|e| {
                        let idx = |x: f64| -> Result<usize, IoError> {
                            if x.fract() == 0.0 && (0.0..=1e6).contains(&x) {
                                Ok(x as usize)
                            } else {
                                Err(IoError::Schema(format!(
                                    "component index {x} is not a small non-negative integer"
                                )))
                            }
                        };
                        Ok(Component::new(
                            idx(e[0])?,
                            idx(e[1])?,
                            idx(e[2])?,
                            idx(e[3])?,
                            e[4],
                        ))
                    })
                    .collect::<Result<Vec<_>, IoError>>()?;
                Ok(CurvatureOperator::from_components(&entries, opts)?)
            }
            (Some(_), Some(_)) => Err(IoError::Schema(
                "both 'matrix' and 'components' given; exactly one is allowed".into(),
            )),
            (None, None) => Err(IoError::Schema(
                "neither 'matrix' nor 'components' given".into(),
            )),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tensor files always serialize")
    }
}

pub fn parse_tensor(
    text: &str,
    opts: BuildOptions<f64>,
) -> Result<CurvatureOperator<f64>, IoError> {
    let file: TensorFile = serde_json::from_str(text)?;
    file.to_operator(opts)
}

/// Reads and validates a tensor file.
pub fn load(path: &Path, opts: BuildOptions<f64>) -> Result<CurvatureOperator<f64>, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_tensor(&text, opts)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One line of `scan` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub index: u64,
    pub s: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub w3_plus: f64,
    pub w3_minus: f64,
    pub scalar_positive: bool,
    pub hypothesis_a: bool,
    pub hypothesis_b: bool,
    pub nnic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub trials: u64,
    pub frac_scalar_positive: f64,
    pub frac_hypothesis_a: f64,
    pub frac_hypothesis_b: f64,
    pub frac_nnic: f64,
    /// Tensors with `s > 0` satisfying a hypothesis but failing NNIC.
    pub implication_violations: u64,
}

/// Per-trial outcome of `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyTrial {
    pub index: u64,
    pub s: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub oracle_min: f64,
    pub oracle_max: f64,
    /// `|k1 + k2 + k3 − s/4|`.
    pub identity_error: f64,
    pub identity_ok: bool,
    pub oracle_ok: bool,
    pub sound: bool,
    pub chain_applies: bool,
    pub chain_ok: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub trials: u64,
    pub passed: u64,
    pub failed: u64,
    pub chain_applicable: u64,
}

/// A line of JSON-lines output. The header carries the format version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    Header {
        format: String,
        tool_version: String,
        config: serde_json::Value,
    },
    Row(ScanRow),
    Trial(VerifyTrial),
    Summary(serde_json::Value),
}

impl Record {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }
}

/// Shortest round-trip decimal for a float, identical to its JSON token.
pub fn num(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| x.to_string())
}
