//! Cyclic Jacobi eigensolver for small symmetric matrices.

use super::{NumericsError, SymMatrix};
use crate::scalar::Real;

/// Relative off-diagonal threshold at which a sweep sequence stops.
pub const JACOBI_OFFDIAG_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 64;

/// Eigen-decomposition of a symmetric matrix.
///
/// `values` ascend; `vectors[k]` is the unit eigenvector for `values[k]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymEigen<T, const N: usize> {
    pub values: [T; N],
    pub vectors: [[T; N]; N],
}

impl<T: Real, const N: usize> SymEigen<T, N> {
    /// `V Λ Vᵀ`, mostly useful for checking the decomposition.
    pub fn reconstruct(&self) -> SymMatrix<T, N> {
        SymMatrix::from_upper(|i, j| {
            (0..N).fold(T::zero(), |acc, k| {
                acc + self.vectors[k][i] * self.values[k] * self.vectors[k][j]
            })
        })
    }
}

/// Eigenvalues (ascending) and eigenvectors of `m` by cyclic Jacobi rotations.
///
/// Iterates until the off-diagonal Frobenius norm is below
/// [`JACOBI_OFFDIAG_TOL`] times the Frobenius norm of `m`. Equal eigenvalues
/// keep the order in which they appear on the rotated diagonal.
pub fn eig_sym<T: Real, const N: usize>(
    m: &SymMatrix<T, N>,
) -> Result<SymEigen<T, N>, NumericsError> {
    let mut a = *m.rows();
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if !x.is_finite() {
                return Err(NumericsError::NonFinite { row: i, col: j });
            }
        }
    }
    let mut v = [[T::zero(); N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = T::one();
    }

    let threshold = T::tol(JACOBI_OFFDIAG_TOL) * m.frobenius();
    let mut converged = false;
    let mut off = off_norm(&a);
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                rotate(&mut a, &mut v, p, q);
            }
        }
        off = off_norm(&a);
    }
    if !converged && off > threshold {
        return Err(NumericsError::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
            off: off.as_f64(),
        });
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| {
        a[i][i]
            .partial_cmp(&a[j][j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.map(|k| a[k][k]);
    let vectors = order.map(|k| std::array::from_fn(|i| v[i][k]));
    Ok(SymEigen { values, vectors })
}

fn off_norm<T: Real, const N: usize>(a: &[[T; N]; N]) -> T {
    let mut acc = T::zero();
    for p in 0..N {
        for q in (p + 1)..N {
            acc = acc + a[p][q] * a[p][q];
        }
    }
    acc.sqrt()
}

/// One Jacobi rotation annihilating `a[p][q]`, accumulated into the columns of `v`.
fn rotate<T: Real, const N: usize>(a: &mut [[T; N]; N], v: &mut [[T; N]; N], p: usize, q: usize) {
    let apq = a[p][q];
    if apq == T::zero() {
        return;
    }
    let theta = (a[q][q] - a[p][p]) / (T::two() * apq);
    let t = if theta >= T::zero() {
        T::one() / (theta + theta.hypot(T::one()))
    } else {
        -T::one() / (-theta + theta.hypot(T::one()))
    };
    let c = T::one() / t.hypot(T::one());
    let s = t * c;

    for row in a.iter_mut() {
        let (akp, akq) = (row[p], row[q]);
        row[p] = c * akp - s * akq;
        row[q] = s * akp + c * akq;
    }
    for k in 0..N {
        let (apk, aqk) = (a[p][k], a[q][k]);
        a[p][k] = c * apk - s * aqk;
        a[q][k] = s * apk + c * aqk;
    }
    a[p][q] = T::zero();
    a[q][p] = T::zero();

    for row in v.iter_mut() {
        let (vkp, vkq) = (row[p], row[q]);
        row[p] = c * vkp - s * vkq;
        row[q] = s * vkp + c * vkq;
    }
}
