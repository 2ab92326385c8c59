use serde::{Deserialize, Serialize};

use super::{CurvatureError, TwoForm};
use crate::numerics::{gram_schmidt, Frame4, Vector4};
use crate::scalar::Real;

/// Orthonormality tolerance for a plane's spanning pair.
const PLANE_TOL: f64 = 1e-12;

/// Oriented 2-plane in R⁴ given by an ordered orthonormal pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plane<T> {
    u: Vector4<T>,
    v: Vector4<T>,
}

impl<T: Real> Plane<T> {
    /// Accepts `(u, v)` if it is orthonormal to within `1e-12`.
    pub fn new(u: Vector4<T>, v: Vector4<T>) -> Result<Self, CurvatureError> {
        let p = Plane { u, v };
        let defect = p.orthonormality_defect();
        if !(defect <= T::tol(PLANE_TOL)) {
            return Err(CurvatureError::NonOrthonormal {
                defect: defect.as_f64(),
            });
        }
        Ok(p)
    }

    /// The plane spanned by `u, v` (in that orientation), orthonormalized.
    pub fn spanned_by(u: Vector4<T>, v: Vector4<T>) -> Result<Self, CurvatureError> {
        let q = gram_schmidt(&[u, v])?;
        Ok(Plane { u: q[0], v: q[1] })
    }

    /// `span{e_i, e_j}` for zero-based coordinate indices.
    pub fn coordinate(i: usize, j: usize) -> Self {
        assert!(
            i < 4 && j < 4 && i != j,
            "coordinate plane needs distinct indices in 0..4"
        );
        Plane {
            u: Vector4::basis(i),
            v: Vector4::basis(j),
        }
    }

    /// The plane of the first two rows of a frame.
    pub fn from_frame(f: &Frame4<T>) -> Self {
        Plane {
            u: f.rows[0],
            v: f.rows[1],
        }
    }

    pub fn u(&self) -> Vector4<T> {
        self.u
    }

    pub fn v(&self) -> Vector4<T> {
        self.v
    }

    pub fn two_form(&self) -> TwoForm<T> {
        TwoForm::wedge(&self.u, &self.v)
    }

    pub fn orthonormality_defect(&self) -> T {
        let a = (self.u.dot(&self.u) - T::one()).abs();
        let b = (self.v.dot(&self.v) - T::one()).abs();
        let c = self.u.dot(&self.v).abs();
        a.max(b).max(c)
    }

    /// Orthogonal complement, oriented so that its 2-form is `⋆(u ∧ v)`.
    ///
    /// The spanning pair is built from the standard basis vectors with the
    /// largest components orthogonal to the plane, so coordinate planes map to
    /// coordinate planes.
    pub fn complement(&self) -> Self {
        let mut chosen: Vec<Vector4<T>> = vec![self.u, self.v];
        for _ in 0..2 {
            let mut best: Option<(T, Vector4<T>)> = None;
            for i in 0..4 {
                let mut r = Vector4::basis(i);
                for _ in 0..2 {
                    for q in &chosen {
                        r = r - *q * q.dot(&r);
                    }
                }
                let n = r.norm();
                if best.is_none_or(|(bn, _)| n > bn) {
                    best = Some((n, r.scale(T::one() / n)));
                }
            }
            // Some basis vector always has a component of length ≥ 1/√2
            // outside a subspace of dimension ≤ 3.
            chosen.push(best.expect("four candidates").1);
        }
        let (w1, w2) = (chosen[2], chosen[3]);
        let target = self.two_form().star();
        if TwoForm::wedge(&w1, &w2).dot(&target) >= T::zero() {
            Plane { u: w1, v: w2 }
        } else {
            Plane { u: w2, v: w1 }
        }
    }

    /// True when both planes are the same subspace (orientation ignored).
    pub fn same_span(&self, other: &Self, tol: T) -> bool {
        let a = self.two_form();
        let b = other.two_form();
        a.max_abs_diff(&b) <= tol || a.max_abs_diff(&(b * -T::one())) <= tol
    }
}
