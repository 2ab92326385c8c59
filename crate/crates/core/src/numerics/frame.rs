use serde::{Deserialize, Serialize};

use super::{NumericsError, RngStream, Vector4};
use crate::scalar::Real;

/// Relative pivot size below which Gram-Schmidt reports rank deficiency.
pub const GRAM_SCHMIDT_PIVOT_TOL: f64 = 1e-10;

/// Orthonormalizes `vs` in order (modified Gram-Schmidt, two passes).
///
/// The first output is `vs[0]` normalized and each prefix spans the same
/// subspace as the corresponding input prefix. A vector whose component
/// orthogonal to the previous ones is shorter than
/// [`GRAM_SCHMIDT_PIVOT_TOL`] times its own length is rejected.
pub fn gram_schmidt<T: Real>(vs: &[Vector4<T>]) -> Result<Vec<Vector4<T>>, NumericsError> {
    let mut out: Vec<Vector4<T>> = Vec::with_capacity(vs.len());
    for (index, v) in vs.iter().enumerate() {
        let n0 = v.norm();
        if !v.is_finite() || n0 == T::zero() || out.len() == 4 {
            return Err(NumericsError::Degenerate { index });
        }
        let mut r = *v;
        for _ in 0..2 {
            for q in &out {
                r = r - *q * q.dot(&r);
            }
        }
        let n = r.norm();
        if n < T::lit(GRAM_SCHMIDT_PIVOT_TOL) * n0 {
            return Err(NumericsError::Degenerate { index });
        }
        out.push(r.scale(T::one() / n));
    }
    Ok(out)
}

/// Orthonormal 4-frame stored as rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame4<T> {
    pub rows: [Vector4<T>; 4],
}

impl<T: Real> Frame4<T> {
    pub fn standard() -> Self {
        Frame4 {
            rows: std::array::from_fn(Vector4::basis),
        }
    }

    /// Orthonormalizes four vectors into a frame.
    pub fn from_vectors(vs: [Vector4<T>; 4]) -> Result<Self, NumericsError> {
        let q = gram_schmidt(&vs)?;
        Ok(Frame4 {
            rows: [q[0], q[1], q[2], q[3]],
        })
    }

    /// `‖F Fᵀ − I‖_max`.
    pub fn orthogonality_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { T::one() } else { T::zero() };
                worst = worst.max((self.rows[i].dot(&self.rows[j]) - want).abs());
            }
        }
        worst
    }

    pub fn as_array(&self) -> [[T; 4]; 4] {
        self.rows.map(|r| r.0)
    }

    pub fn determinant(&self) -> T {
        let m = self.as_array();
        let mut det = T::zero();
        for c in 0..4 {
            let minor: [[T; 3]; 3] = std::array::from_fn(|i| {
                let mut k = 0;
                std::array::from_fn(|_| {
                    if k == c {
                        k += 1;
                    }
                    let x = m[i + 1][k];
                    k += 1;
                    x
                })
            });
            let d3 = minor[0][0] * (minor[1][1] * minor[2][2] - minor[1][2] * minor[2][1])
                - minor[0][1] * (minor[1][0] * minor[2][2] - minor[1][2] * minor[2][0])
                + minor[0][2] * (minor[1][0] * minor[2][1] - minor[1][1] * minor[2][0]);
            let sign = if c % 2 == 0 { T::one() } else { -T::one() };
            det = det + sign * m[0][c] * d3;
        }
        det
    }
}

/// Haar-distributed orthonormal frame: four Gaussian vectors orthonormalized
/// in order. Degenerate draws (probability zero) are redrawn.
pub fn random_frame4<T: Real>(rng: &mut RngStream) -> Frame4<T> {
    loop {
        let vs = [
            rng.gaussian_vector4(),
            rng.gaussian_vector4(),
            rng.gaussian_vector4(),
            rng.gaussian_vector4(),
        ];
        if let Ok(f) = Frame4::from_vectors(vs) {
            return f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: [f64; 4]) -> Vector4<f64> {
        Vector4(x)
    }

    #[test]
    fn standard_basis_is_fixed() {
        let e: Vec<_> = (0..4).map(Vector4::<f64>::basis).collect();
        assert_eq!(gram_schmidt(&e).unwrap(), e);
    }

    #[test]
    fn two_vectors_in_the_plane() {
        let out = gram_schmidt(&[v([2.0, 0.0, 0.0, 0.0]), v([1.0, 1.0, 0.0, 0.0])]).unwrap();
        assert_eq!(out[0], v([1.0, 0.0, 0.0, 0.0]));
        assert!(out[1].max_abs_diff(&v([0.0, 1.0, 0.0, 0.0])) < 1e-15);
    }

    #[test]
    fn repeated_vector_is_degenerate() {
        let e1 = v([1.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            gram_schmidt(&[e1, e1]),
            Err(NumericsError::Degenerate { index: 1 })
        );
        assert_eq!(
            gram_schmidt(&[Vector4::<f64>::zero()]),
            Err(NumericsError::Degenerate { index: 0 })
        );
    }

    #[test]
    fn random_frames_are_orthonormal() {
        for seed in 0..200 {
            let f: Frame4<f64> = random_frame4(&mut RngStream::new(seed, 0));
            assert!(f.orthogonality_defect() <= 1e-12);
            assert!((f.determinant().abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_frame_is_deterministic_per_seed_and_chunk() {
        let a: Frame4<f64> = random_frame4(&mut RngStream::new(9, 0));
        let b: Frame4<f64> = random_frame4(&mut RngStream::new(9, 0));
        let c: Frame4<f64> = random_frame4(&mut RngStream::new(10, 0));
        for (x, y) in a
            .as_array()
            .iter()
            .flatten()
            .zip(b.as_array().iter().flatten())
        {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_ne!(a, c);
    }

    #[test]
    fn both_orientations_occur() {
        let mut r = RngStream::new(3, 0);
        let dets: Vec<f64> = (0..64)
            .map(|_| random_frame4::<f64>(&mut r).determinant())
            .collect();
        assert!(dets.iter().any(|&d| d > 0.0));
        assert!(dets.iter().any(|&d| d < 0.0));
    }

    #[test]
    fn rotation_invariance_of_first_vector_moments() {
        // E[x_i²] = 1/4 for every coordinate of a Haar-random unit vector,
        // before and after a fixed rotation.
        let theta = 0.7f64;
        let (c, s) = (theta.cos(), theta.sin());
        let mut r = RngStream::new(11, 0);
        let n = 20000;
        let mut m = [0.0f64; 4];
        let mut mr = [0.0f64; 4];
        for _ in 0..n {
            let f: Frame4<f64> = random_frame4(&mut r);
            let x = f.rows[0].0;
            let y = [c * x[0] - s * x[2], x[1], s * x[0] + c * x[2], x[3]];
            for i in 0..4 {
                m[i] += x[i] * x[i] / n as f64;
                mr[i] += y[i] * y[i] / n as f64;
            }
        }
        for i in 0..4 {
            assert!((m[i] - 0.25).abs() < 0.01, "{m:?}");
            assert!((mr[i] - 0.25).abs() < 0.01, "{mr:?}");
        }
    }
}
