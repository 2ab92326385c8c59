//! Brute-force extrema of curvature functions over planes and frames.
//!
//! The search has two phases. First `samples` Haar-random points are drawn
//! in fixed chunks of [`CHUNK_SIZE`], chunk `c` using the random substream
//! `(seed, c)`, and the best `restarts` candidates are kept. Each candidate
//! is then hill-climbed: every iteration draws [`PROPOSALS_PER_ITER`] random
//! perturbations of the current step size, moves to the best one if it
//! improves the objective, and otherwise shrinks the step by `step_decay`.
//! An improving move is then repeated with doubled length for as long as
//! that keeps improving, so nearly flat valleys are crossed quickly.
//!
//! Chunks and restarts may run on any number of threads. Their results are
//! merged by `(value, index)` so the outcome is the same for every schedule.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{CurvatureOperator, Plane};
use crate::numerics::{gram_schmidt, random_frame4, Frame4, RngStream, Vector4};
use crate::scalar::Real;

pub const CHUNK_SIZE: usize = 1000;
pub const PROPOSALS_PER_ITER: usize = 8;
/// Refinement streams live in the upper half of the stream space.
const REFINE_STREAM: u64 = 1 << 63;
/// Longest run of doubled pattern moves after one successful proposal.
const MAX_PATTERN_DOUBLINGS: usize = 10;
/// A refinement whose step fell below this many radians counts as converged.
pub const CONVERGED_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub samples: usize,
    pub refine_iters: usize,
    pub restarts: usize,
    /// Initial perturbation size in radians.
    pub step_init: f64,
    pub step_decay: f64,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            samples: 20_000,
            refine_iters: 200,
            restarts: 3,
            step_init: 0.3,
            step_decay: 0.9,
            seed: 0,
        }
    }
}

impl OracleConfig {
    pub fn with_seed(seed: u64) -> Self {
        OracleConfig {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if self.samples == 0 {
            return Err(OracleError::InvalidConfig("samples must be at least 1"));
        }
        if !(self.step_decay > 0.0 && self.step_decay < 1.0) {
            return Err(OracleError::InvalidConfig("step_decay must lie in (0, 1)"));
        }
        if !(self.step_init >= 0.0 && self.step_init.is_finite()) {
            return Err(OracleError::InvalidConfig(
                "step_init must be finite and non-negative",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Sectional,
    Biorthogonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness<T> {
    Plane(Plane<T>),
    Frame(Frame4<T>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremumResult<T> {
    pub value: T,
    pub witness: Witness<T>,
    /// Random points drawn in the coarse phase.
    pub samples_used: usize,
    /// Objective evaluations including refinement.
    pub evaluations: usize,
    pub converged: bool,
}

/// Extremum of sectional or biorthogonal curvature over all 2-planes.
pub fn extremize<T: Real>(
    op: &CurvatureOperator<T>,
    objective: Objective,
    mode: Mode,
    cfg: &OracleConfig,
) -> Result<ExtremumResult<T>, OracleError> {
    let domain = Planes { op, objective };
    let found = search(&domain, mode, cfg)?;
    Ok(found.into_result(Witness::Plane))
}

/// Minimum over orthonormal frames of the isotropic curvature
/// `K13 + K14 + K23 + K24 − 2·R1234`.
pub fn min_isotropic<T: Real>(
    op: &CurvatureOperator<T>,
    cfg: &OracleConfig,
) -> Result<ExtremumResult<T>, OracleError> {
    let found = search(&Frames { op }, Mode::Min, cfg)?;
    Ok(found.into_result(Witness::Frame))
}

/// Objective value of a witness, recomputed from scratch.
pub fn evaluate_witness<T: Real>(
    op: &CurvatureOperator<T>,
    objective: Objective,
    witness: &Witness<T>,
) -> T {
    match witness {
        Witness::Plane(p) => match objective {
            Objective::Sectional => op.sectional(p),
            Objective::Biorthogonal => op.biorthogonal(p),
        },
        Witness::Frame(f) => op.isotropic(f),
    }
}

/// Random move of a plane along the Grassmannian: `u, v` are pushed along
/// a uniformly random unit tangent direction (a 2×2 block into `P⊥`) by
/// `step`, then re-orthonormalized. The largest principal angle moved is at
/// most `atan(step)`.
pub fn perturb_plane<T: Real>(p: &Plane<T>, rng: &mut RngStream, step: T) -> Plane<T> {
    if step == T::zero() {
        return *p;
    }
    let (u, v) = (p.u(), p.v());
    let off_plane = |g: Vector4<T>| g - u * u.dot(&g) - v * v.dot(&g);
    loop {
        let h1 = off_plane(rng.gaussian_vector4());
        let h2 = off_plane(rng.gaussian_vector4());
        let n = (h1.dot(&h1) + h2.dot(&h2)).sqrt();
        if !(n > T::tol(1e-8)) {
            continue;
        }
        let k = step / n;
        if let Ok(q) = gram_schmidt(&[u + h1 * k, v + h2 * k]) {
            if let Ok(plane) = Plane::new(q[0], q[1]) {
                return plane;
            }
        }
    }
}

/// Random rotation of a frame: `f ↦ (I + step·Ω) f`, re-orthonormalized,
/// with `Ω` skew-symmetric of operator norm at most 1.
pub fn perturb_frame<T: Real>(f: &Frame4<T>, rng: &mut RngStream, step: T) -> Frame4<T> {
    if step == T::zero() {
        return *f;
    }
    loop {
        let w: [T; 6] = rng.unit_vector();
        let mut omega = [[T::zero(); 4]; 4];
        for (k, &(i, j)) in crate::curvature::PAIRS.iter().enumerate() {
            omega[i][j] = w[k];
            omega[j][i] = -w[k];
        }
        let moved: [Vector4<T>; 4] = std::array::from_fn(|i| {
            (0..4).fold(f.rows[i], |acc, j| acc + f.rows[j] * (step * omega[i][j]))
        });
        if let Ok(g) = Frame4::from_vectors(moved) {
            return g;
        }
    }
}

/// A compact search domain with a scalar objective.
trait Domain<T: Real>: Sync {
    type Point: Copy + Send + Sync;
    fn sample(&self, rng: &mut RngStream) -> Self::Point;
    fn perturb(&self, p: &Self::Point, rng: &mut RngStream, step: T) -> Self::Point;
    fn value(&self, p: &Self::Point) -> T;
    /// The point `from + factor·(to − from)`, re-orthonormalized.
    fn extend(&self, from: &Self::Point, to: &Self::Point, factor: T) -> Option<Self::Point>;
}

struct Planes<'a, T> {
    op: &'a CurvatureOperator<T>,
    objective: Objective,
}

impl<T: Real> Domain<T> for Planes<'_, T> {
    type Point = Plane<T>;

    fn sample(&self, rng: &mut RngStream) -> Plane<T> {
        // The first two rows of a Haar frame are the Gram-Schmidt of the
        // first two Gaussian vectors, so only those are drawn.
        loop {
            let (a, b) = (rng.gaussian_vector4(), rng.gaussian_vector4());
            if let Ok(q) = gram_schmidt(&[a, b]) {
                if let Ok(p) = Plane::new(q[0], q[1]) {
                    return p;
                }
            }
        }
    }

    fn perturb(&self, p: &Plane<T>, rng: &mut RngStream, step: T) -> Plane<T> {
        perturb_plane(p, rng, step)
    }

    fn value(&self, p: &Plane<T>) -> T {
        match self.objective {
            Objective::Sectional => self.op.sectional(p),
            Objective::Biorthogonal => self.op.biorthogonal(p),
        }
    }

    fn extend(&self, from: &Plane<T>, to: &Plane<T>, factor: T) -> Option<Plane<T>> {
        let u = from.u() + (to.u() - from.u()) * factor;
        let v = from.v() + (to.v() - from.v()) * factor;
        Plane::spanned_by(u, v).ok()
    }
}

struct Frames<'a, T> {
    op: &'a CurvatureOperator<T>,
}

impl<T: Real> Domain<T> for Frames<'_, T> {
    type Point = Frame4<T>;

    fn sample(&self, rng: &mut RngStream) -> Frame4<T> {
        random_frame4(rng)
    }

    fn perturb(&self, f: &Frame4<T>, rng: &mut RngStream, step: T) -> Frame4<T> {
        perturb_frame(f, rng, step)
    }

    fn value(&self, f: &Frame4<T>) -> T {
        self.op.isotropic(f)
    }

    fn extend(&self, from: &Frame4<T>, to: &Frame4<T>, factor: T) -> Option<Frame4<T>> {
        let rows = std::array::from_fn(|i| from.rows[i] + (to.rows[i] - from.rows[i]) * factor);
        Frame4::from_vectors(rows).ok()
    }
}

/// A scored point; `score` is the objective negated in max mode so that
/// lower is always better.
#[derive(Clone, Copy)]
struct Scored<P, T> {
    score: T,
    index: u64,
    point: P,
}

struct Found<P, T> {
    best: Scored<P, T>,
    sign: T,
    samples: usize,
    evaluations: usize,
    converged: bool,
}

impl<P, T: Real> Found<P, T> {
    fn into_result(self, wrap: impl FnOnce(P) -> Witness<T>) -> ExtremumResult<T> {
        ExtremumResult {
            value: self.best.score * self.sign,
            witness: wrap(self.best.point),
            samples_used: self.samples,
            evaluations: self.evaluations,
            converged: self.converged,
        }
    }
}

fn better<P, T: Real>(a: &Scored<P, T>, b: &Scored<P, T>) -> std::cmp::Ordering {
    a.score
        .partial_cmp(&b.score)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(a.index.cmp(&b.index))
}

fn search<T: Real, D: Domain<T>>(
    domain: &D,
    mode: Mode,
    cfg: &OracleConfig,
) -> Result<Found<D::Point, T>, OracleError> {
    cfg.validate()?;
    let sign = match mode {
        Mode::Min => T::one(),
        Mode::Max => -T::one(),
    };
    let keep = cfg.restarts.max(1);
    let chunks = cfg.samples.div_ceil(CHUNK_SIZE);

    let mut candidates: Vec<Scored<D::Point, T>> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = RngStream::new(cfg.seed, c as u64);
            let start = c * CHUNK_SIZE;
            let end = (start + CHUNK_SIZE).min(cfg.samples);
            let mut top: Vec<Scored<D::Point, T>> = Vec::with_capacity(keep + 1);
            for index in start..end {
                let point = domain.sample(&mut rng);
                let s = Scored {
                    score: sign * domain.value(&point),
                    index: index as u64,
                    point,
                };
                if top.len() < keep || better(&s, &top[keep - 1]).is_lt() {
                    let at = top.partition_point(|t| better(t, &s).is_lt());
                    top.insert(at, s);
                    top.truncate(keep);
                }
            }
            top
        })
        .collect();
    candidates.sort_by(better);
    candidates.truncate(cfg.restarts);

    let coarse_best = *candidates
        .first()
        .unwrap_or_else(|| unreachable!("samples >= 1"));
    let refined: Vec<(Scored<D::Point, T>, usize, bool)> = candidates
        .par_iter()
        .enumerate()
        .map(|(r, start)| refine(domain, *start, sign, cfg, r as u64))
        .collect();

    let mut best = coarse_best;
    let mut evaluations = cfg.samples;
    let mut converged = false;
    for (s, evals, conv) in refined {
        evaluations += evals;
        if s.score < best.score {
            best = s;
            converged = conv;
        } else if s.score == best.score {
            converged |= conv;
        }
    }
    Ok(Found {
        best,
        sign,
        samples: cfg.samples,
        evaluations,
        converged,
    })
}

fn refine<T: Real, D: Domain<T>>(
    domain: &D,
    start: Scored<D::Point, T>,
    sign: T,
    cfg: &OracleConfig,
    restart: u64,
) -> (Scored<D::Point, T>, usize, bool) {
    let mut rng = RngStream::new(cfg.seed, REFINE_STREAM | restart);
    let mut cur = start;
    let mut step = T::lit(cfg.step_init);
    let decay = T::lit(cfg.step_decay);
    let mut evaluations = 0;
    for _ in 0..cfg.refine_iters {
        let mut best_move: Option<(T, D::Point)> = None;
        for _ in 0..PROPOSALS_PER_ITER {
            let q = domain.perturb(&cur.point, &mut rng, step);
            let s = sign * domain.value(&q);
            evaluations += 1;
            if best_move.is_none_or(|(b, _)| s < b) {
                best_move = Some((s, q));
            }
        }
        match best_move {
            Some((s, q)) if s < cur.score => {
                // Keep doubling a successful move while it pays off, which
                // lets the search travel along shallow valleys.
                let origin = cur.point;
                cur.score = s;
                cur.point = q;
                let mut factor = T::two();
                for _ in 0..MAX_PATTERN_DOUBLINGS {
                    let Some(r) = domain.extend(&origin, &q, factor) else {
                        break;
                    };
                    let sr = sign * domain.value(&r);
                    evaluations += 1;
                    if !(sr < cur.score) {
                        break;
                    }
                    cur.score = sr;
                    cur.point = r;
                    factor = factor * T::two();
                }
            }
            _ => step = step * decay,
        }
    }
    let converged = step <= T::lit(CONVERGED_STEP);
    (cur, evaluations, converged)
}
