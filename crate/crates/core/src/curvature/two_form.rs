use std::ops::{Add, Index, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::numerics::Vector4;
use crate::scalar::Real;

pub const BASIS_LABELS: [&str; 6] = ["e12", "e13", "e14", "e23", "e24", "e34"];

/// Zero-based index pairs of the 2-form basis, in storage order.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Unnormalized self-dual basis (each has norm √2).
pub const PHI_PLUS: [[i8; 6]; 3] = [[1, 0, 0, 0, 0, 1], [0, 1, 0, 0, -1, 0], [0, 0, 1, 1, 0, 0]];

/// Unnormalized anti-self-dual basis (each has norm √2).
pub const PHI_MINUS: [[i8; 6]; 3] = [[1, 0, 0, 0, 0, -1], [0, 1, 0, 0, 1, 0], [0, 0, 1, -1, 0, 0]];

/// Storage index and sign of `e_i ∧ e_j` (zero-based), `None` when `i == j`.
pub fn pair_index(i: usize, j: usize) -> Option<(usize, i8)> {
    let (a, b, sign) = match i.cmp(&j) {
        std::cmp::Ordering::Less => (i, j, 1),
        std::cmp::Ordering::Greater => (j, i, -1),
        std::cmp::Ordering::Equal => return None,
    };
    PAIRS.iter().position(|&p| p == (a, b)).map(|k| (k, sign))
}

/// A 2-form on R⁴ in the basis `(e12, e13, e14, e23, e24, e34)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TwoForm<T>(pub [T; 6]);

impl<T: Real> TwoForm<T> {
    pub fn zero() -> Self {
        TwoForm([T::zero(); 6])
    }

    pub fn basis(k: usize) -> Self {
        let mut w = Self::zero();
        w.0[k] = T::one();
        w
    }

    pub fn wedge(u: &Vector4<T>, v: &Vector4<T>) -> Self {
        TwoForm(PAIRS.map(|(i, j)| u[i] * v[j] - u[j] * v[i]))
    }

    pub fn star(&self) -> Self {
        let a = &self.0;
        TwoForm([a[5], -a[4], a[3], a[2], -a[1], a[0]])
    }

    pub fn dot(&self, other: &Self) -> T {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    /// `⟨α, ⋆α⟩`, proportional to `α ∧ α`.
    pub fn self_pairing(&self) -> T {
        self.dot(&self.star())
    }

    /// Decomposable (`α = u ∧ v`) iff `α ∧ α = 0`.
    pub fn is_decomposable(&self, tol: T) -> bool {
        self.self_pairing().abs() <= tol
    }

    /// Coordinates of the self-dual part in the orthonormal `Λ+` basis.
    pub fn plus_coords(&self) -> [T; 3] {
        project(&self.0, &PHI_PLUS)
    }

    /// Coordinates of the anti-self-dual part in the orthonormal `Λ−` basis.
    pub fn minus_coords(&self) -> [T; 3] {
        project(&self.0, &PHI_MINUS)
    }

    /// Inverse of the `(plus_coords, minus_coords)` split.
    pub fn from_coords(plus: [T; 3], minus: [T; 3]) -> Self {
        let r = T::FRAC_1_SQRT_2();
        let mut w = [T::zero(); 6];
        for (c, phi) in plus.iter().zip(PHI_PLUS.iter()) {
            for k in 0..6 {
                w[k] = w[k] + *c * r * T::lit(phi[k] as f64);
            }
        }
        for (c, phi) in minus.iter().zip(PHI_MINUS.iter()) {
            for k in 0..6 {
                w[k] = w[k] + *c * r * T::lit(phi[k] as f64);
            }
        }
        TwoForm(w)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (0..6).fold(T::zero(), |m, k| m.max((self.0[k] - other.0[k]).abs()))
    }
}

fn project<T: Real>(a: &[T; 6], basis: &[[i8; 6]; 3]) -> [T; 3] {
    let r = T::FRAC_1_SQRT_2();
    basis.map(|phi| {
        phi.iter()
            .zip(a.iter())
            .fold(T::zero(), |acc, (&p, &x)| acc + T::lit(p as f64) * x)
            * r
    })
}

impl<T> Index<usize> for TwoForm<T> {
    type Output = T;
    fn index(&self, k: usize) -> &T {
        &self.0[k]
    }
}

impl<T: Real> Add for TwoForm<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        TwoForm(std::array::from_fn(|k| self.0[k] + rhs.0[k]))
    }
}

impl<T: Real> Sub for TwoForm<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        TwoForm(std::array::from_fn(|k| self.0[k] - rhs.0[k]))
    }
}

impl<T: Real> Mul<T> for TwoForm<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        TwoForm(self.0.map(|x| x * k))
    }
}
