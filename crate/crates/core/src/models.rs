//! Benchmark curvature tensors.
//!
//! All models use the sign convention of [`crate::curvature`]: the unit
//! round sphere is the identity form, and `⟨M(e_i∧e_j), e_i∧e_j⟩` is the
//! sectional curvature of the coordinate plane `span{e_i, e_j}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{BuildOptions, Component, CurvatureError, CurvatureOperator};
use crate::numerics::{RngStream, SymMatrix6};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown model '{0}' (expected sphere, space_form, product_surfaces, cp2, r_times_s3, flat or random_bianchi)")]
    Unknown(String),
    #[error("model '{name}' takes {expected} parameter(s), got {got}")]
    Arity {
        name: &'static str,
        expected: &'static str,
        got: usize,
    },
    #[error("invalid number '{0}' in model specification")]
    BadNumber(String),
    #[error("model parameter {param} must be positive and finite, got {value}")]
    NonPositive { param: &'static str, value: f64 },
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
}

/// A named model and its parameters.
///
/// Textual form: `name[:p1,p2,...]`, e.g. `cp2`, `sphere:2`, `product:1,1`,
/// `random_bianchi:1,42` (scale, then seed).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ModelSpec {
    Sphere { radius: f64 },
    SpaceForm { curvature: f64 },
    ProductSurfaces { k1: f64, k2: f64 },
    Cp2 { scale: f64 },
    RTimesS3 { radius: f64 },
    Flat,
    RandomBianchi { scale: f64, seed: u64 },
}

impl ModelSpec {
    /// Parses the textual form; `random_bianchi` without an explicit seed
    /// takes `default_seed`.
    pub fn parse_with_seed(s: &str, default_seed: u64) -> Result<Self, ModelError> {
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), p.trim()),
            None => (s.trim(), ""),
        };
        let raw: Vec<&str> = if params.is_empty() {
            Vec::new()
        } else {
            params.split(',').map(str::trim).collect()
        };
        let nums = || -> Result<Vec<f64>, ModelError> {
            raw.iter()
                .map(|x| {
                    x.parse::<f64>()
                        .map_err(|_| ModelError::BadNumber(x.to_string()))
                })
                .collect()
        };
        let arity = |name: &'static str, expected: &'static str| ModelError::Arity {
            name,
            expected,
            got: raw.len(),
        };
        let spec = match name {
            "sphere" => match nums()?[..] {
                [] => ModelSpec::Sphere { radius: 1.0 },
                [radius] => ModelSpec::Sphere { radius },
                _ => return Err(arity("sphere", "0 or 1")),
            },
            "space_form" => match nums()?[..] {
                [curvature] => ModelSpec::SpaceForm { curvature },
                _ => return Err(arity("space_form", "1")),
            },
            "product" | "product_surfaces" => match nums()?[..] {
                [] => ModelSpec::ProductSurfaces { k1: 1.0, k2: 1.0 },
                [k1, k2] => ModelSpec::ProductSurfaces { k1, k2 },
                _ => return Err(arity("product_surfaces", "0 or 2")),
            },
            "cp2" => match nums()?[..] {
                [] => ModelSpec::Cp2 { scale: 1.0 },
                [scale] => ModelSpec::Cp2 { scale },
                _ => return Err(arity("cp2", "0 or 1")),
            },
            "r_times_s3" => match nums()?[..] {
                [] => ModelSpec::RTimesS3 { radius: 1.0 },
                [radius] => ModelSpec::RTimesS3 { radius },
                _ => return Err(arity("r_times_s3", "0 or 1")),
            },
            "flat" => match raw.len() {
                0 => ModelSpec::Flat,
                _ => return Err(arity("flat", "0")),
            },
            "random" | "random_bianchi" => {
                let scale = match raw.first() {
                    Some(x) => x
                        .parse()
                        .map_err(|_| ModelError::BadNumber(x.to_string()))?,
                    None => 1.0,
                };
                let seed = match raw.get(1) {
                    Some(x) => x
                        .parse()
                        .map_err(|_| ModelError::BadNumber(x.to_string()))?,
                    None => default_seed,
                };
                if raw.len() > 2 {
                    return Err(arity("random_bianchi", "0, 1 or 2"));
                }
                ModelSpec::RandomBianchi { scale, seed }
            }
            other => return Err(ModelError::Unknown(other.to_string())),
        };
        Ok(spec)
    }

    pub fn build<T: Real>(&self) -> Result<CurvatureOperator<T>, ModelError> {
        match *self {
            ModelSpec::Sphere { radius } => sphere(T::lit(radius)),
            ModelSpec::SpaceForm { curvature } => Ok(space_form(T::lit(curvature))),
            ModelSpec::ProductSurfaces { k1, k2 } => Ok(product_surfaces(T::lit(k1), T::lit(k2))),
            ModelSpec::Cp2 { scale } => cp2(T::lit(scale)),
            ModelSpec::RTimesS3 { radius } => r_times_s3(T::lit(radius)),
            ModelSpec::Flat => Ok(flat()),
            ModelSpec::RandomBianchi { scale, seed } => {
                random_bianchi(&mut RngStream::new(seed, 0), T::lit(scale))
            }
        }
    }
}

impl FromStr for ModelSpec {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, ModelError> {
        Self::parse_with_seed(s, 0)
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Sphere { radius } => write!(f, "sphere:{radius}"),
            ModelSpec::SpaceForm { curvature } => write!(f, "space_form:{curvature}"),
            ModelSpec::ProductSurfaces { k1, k2 } => write!(f, "product_surfaces:{k1},{k2}"),
            ModelSpec::Cp2 { scale } => write!(f, "cp2:{scale}"),
            ModelSpec::RTimesS3 { radius } => write!(f, "r_times_s3:{radius}"),
            ModelSpec::Flat => write!(f, "flat"),
            ModelSpec::RandomBianchi { scale, seed } => write!(f, "random_bianchi:{scale},{seed}"),
        }
    }
}

fn positive<T: Real>(param: &'static str, x: T) -> Result<T, ModelError> {
    if x > T::zero() && x.is_finite() {
        Ok(x)
    } else {
        Err(ModelError::NonPositive {
            param,
            value: x.as_f64(),
        })
    }
}

fn exact<T: Real>(m: SymMatrix6<T>) -> CurvatureOperator<T> {
    // Every closed-form model below has structurally zero Bianchi couplings.
    CurvatureOperator::unvalidated(m)
}

/// Constant curvature `k`: `M = k·I` (sphere, flat or hyperbolic).
pub fn space_form<T: Real>(k: T) -> CurvatureOperator<T> {
    exact(SymMatrix6::scaled_identity(k))
}

/// Round sphere of the given radius: `M = I/radius²`.
pub fn sphere<T: Real>(radius: T) -> Result<CurvatureOperator<T>, ModelError> {
    let r = positive("radius", radius)?;
    Ok(space_form(T::one() / (r * r)))
}

pub fn flat<T: Real>() -> CurvatureOperator<T> {
    space_form(T::zero())
}

/// Riemannian product of surfaces with Gauss curvatures `k1` on
/// `span{e1, e2}` and `k2` on `span{e3, e4}`.
pub fn product_surfaces<T: Real>(k1: T, k2: T) -> CurvatureOperator<T> {
    let z = T::zero();
    exact(SymMatrix6::diagonal([k1, z, z, z, z, k2]))
}

/// Fubini-Study `CP²` at a point, from
/// `R_ijkl = scale·(δ_ik δ_jl − δ_il δ_jk + J_ik J_jl − J_il J_jk + 2 J_ij J_kl)`
/// with `J e1 = e2`, `J e3 = e4`. At scale 1 the holomorphic sectional
/// curvature is 4 and `s = 24`.
pub fn cp2<T: Real>(scale: T) -> Result<CurvatureOperator<T>, ModelError> {
    let c = positive("scale", scale)?;
    let mut j = [[T::zero(); 4]; 4];
    j[0][1] = T::one();
    j[1][0] = -T::one();
    j[2][3] = T::one();
    j[3][2] = -T::one();
    let delta = |a: usize, b: usize| if a == b { T::one() } else { T::zero() };
    let mut entries = Vec::with_capacity(256);
    for a in 0..4 {
        for b in 0..4 {
            for p in 0..4 {
                for q in 0..4 {
                    let r = delta(a, p) * delta(b, q) - delta(a, q) * delta(b, p)
                        + j[a][p] * j[b][q]
                        - j[a][q] * j[b][p]
                        + T::two() * j[a][b] * j[p][q];
                    entries.push(Component::new(a + 1, b + 1, p + 1, q + 1, c * r));
                }
            }
        }
    }
    Ok(CurvatureOperator::from_components(
        &entries,
        BuildOptions::default(),
    )?)
}

/// `ℝ × S³(radius)` with the flat direction along `e4`.
pub fn r_times_s3<T: Real>(radius: T) -> Result<CurvatureOperator<T>, ModelError> {
    let r = positive("radius", radius)?;
    let k = T::one() / (r * r);
    let z = T::zero();
    Ok(exact(SymMatrix6::diagonal([k, k, z, k, z, z])))
}

/// Symmetric Gaussian form (21 i.i.d. entries with standard deviation
/// `scale`) projected onto the Bianchi hyperplane.
pub fn random_bianchi<T: Real>(
    rng: &mut RngStream,
    scale: T,
) -> Result<CurvatureOperator<T>, ModelError> {
    let scale = positive("scale", scale)?;
    let m = SymMatrix6::from_upper(|_, _| rng.gaussian::<T>() * scale);
    Ok(CurvatureOperator::unvalidated(m).project_bianchi())
}
