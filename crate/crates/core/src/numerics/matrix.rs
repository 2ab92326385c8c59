use serde::{Deserialize, Serialize};

use super::eigen::{eig_sym, SymEigen};
use super::{NumericsError, Vector4};
use crate::scalar::Real;

/// Real symmetric `N×N` matrix.
///
/// Symmetry is enforced on construction: either the input is built from a
/// generator evaluated on the upper triangle, or a full row array is checked
/// against a tolerance and then symmetrized exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMatrix<T, const N: usize> {
    a: [[T; N]; N],
}

pub type SymMatrix3<T> = SymMatrix<T, 3>;
pub type SymMatrix4<T> = SymMatrix<T, 4>;
pub type SymMatrix6<T> = SymMatrix<T, 6>;

impl<T: Real, const N: usize> SymMatrix<T, N> {
    pub fn zeros() -> Self {
        SymMatrix {
            a: [[T::zero(); N]; N],
        }
    }

    pub fn identity() -> Self {
        Self::scaled_identity(T::one())
    }

    pub fn scaled_identity(k: T) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.a[i][i] = k;
        }
        m
    }

    pub fn diagonal(d: [T; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.a[i][i] = d[i];
        }
        m
    }

    /// Builds a matrix from `f(i, j)` evaluated for `i <= j` only.
    pub fn from_upper(mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in i..N {
                let x = f(i, j);
                m.a[i][j] = x;
                m.a[j][i] = x;
            }
        }
        m
    }

    /// Validates `rows` as symmetric to within `rel_tol·(1 + max|a_ij|)` and
    /// stores the exact symmetrization `(A + Aᵀ)/2`.
    pub fn from_rows(rows: [[T; N]; N], rel_tol: T) -> Result<Self, NumericsError> {
        let mut scale = T::zero();
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(NumericsError::NonFinite { row: i, col: j });
                }
                scale = scale.max(x.abs());
            }
        }
        let mut worst = (0, 0, T::zero());
        for i in 0..N {
            for j in (i + 1)..N {
                let d = (rows[i][j] - rows[j][i]).abs();
                if d > worst.2 {
                    worst = (i, j, d);
                }
            }
        }
        if worst.2 > rel_tol * (T::one() + scale) {
            return Err(NumericsError::Asymmetric {
                row: worst.0,
                col: worst.1,
                diff: worst.2.as_f64(),
            });
        }
        Ok(Self::from_upper(|i, j| {
            if i == j {
                rows[i][i]
            } else {
                (rows[i][j] + rows[j][i]) * T::half()
            }
        }))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.a[i][j]
    }

    /// Sets the `(i, j)` and `(j, i)` entries together.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: T) {
        self.a[i][j] = x;
        self.a[j][i] = x;
    }

    pub fn rows(&self) -> &[[T; N]; N] {
        &self.a
    }

    pub fn trace(&self) -> T {
        (0..N).fold(T::zero(), |acc, i| acc + self.a[i][i])
    }

    pub fn max_abs(&self) -> T {
        crate::scalar::max_abs(self.a.iter().flatten().copied())
    }

    pub fn frobenius(&self) -> T {
        self.a
            .iter()
            .flatten()
            .fold(T::zero(), |acc, &x| acc + x * x)
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for i in 0..N {
            for j in 0..N {
                m = m.max((self.a[i][j] - other.a[i][j]).abs());
            }
        }
        m
    }

    pub fn scale(&self, k: T) -> Self {
        Self::from_upper(|i, j| self.a[i][j] * k)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_upper(|i, j| self.a[i][j] + other.a[i][j])
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_upper(|i, j| self.a[i][j] - other.a[i][j])
    }

    pub fn mul_vec(&self, x: &[T; N]) -> [T; N] {
        let mut y = [T::zero(); N];
        for (yi, row) in y.iter_mut().zip(self.a.iter()) {
            *yi = row
                .iter()
                .zip(x.iter())
                .fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        }
        y
    }

    /// Bilinear form `xᵀ A y`.
    pub fn bilinear(&self, x: &[T; N], y: &[T; N]) -> T {
        let ay = self.mul_vec(y);
        x.iter()
            .zip(ay.iter())
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    /// `Q A Qᵀ` for a row-major `Q` (orthogonal in all intended uses).
    pub fn conjugate(&self, q: &[[T; N]; N]) -> Self {
        Self::from_upper(|i, j| {
            let mut acc = T::zero();
            for k in 0..N {
                for l in 0..N {
                    acc = acc + q[i][k] * self.a[k][l] * q[j][l];
                }
            }
            acc
        })
    }

    pub fn eig(&self) -> Result<SymEigen<T, N>, NumericsError> {
        eig_sym(self)
    }
}

impl<T: Real> SymMatrix3<T> {
    /// Sorted eigenvalues of a 3×3 symmetric form.
    pub fn spectrum(&self) -> Result<Spectrum3<T>, NumericsError> {
        Ok(Spectrum3::new(self.eig()?.values))
    }
}

impl<T: Real> SymMatrix4<T> {
    pub fn bilinear_vec(&self, x: &Vector4<T>, y: &Vector4<T>) -> T {
        self.bilinear(&x.0, &y.0)
    }
}

/// Three reals in ascending order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spectrum3<T>([T; 3]);

impl<T: Real> Spectrum3<T> {
    /// Sorts `v` ascending (NaNs compare equal, order otherwise stable).
    pub fn new(mut v: [T; 3]) -> Self {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        Spectrum3(v)
    }

    pub fn zeros() -> Self {
        Spectrum3([T::zero(); 3])
    }

    pub fn values(&self) -> [T; 3] {
        self.0
    }

    pub fn min(&self) -> T {
        self.0[0]
    }

    pub fn mid(&self) -> T {
        self.0[1]
    }

    pub fn max(&self) -> T {
        self.0[2]
    }

    pub fn sum(&self) -> T {
        self.0[0] + self.0[1] + self.0[2]
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (0..3).fold(T::zero(), |m, i| m.max((self.0[i] - other.0[i]).abs()))
    }
}

impl<T> std::ops::Index<usize> for Spectrum3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}
