use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// A tangent vector in R⁴ with respect to a fixed orthonormal basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector4<T>(pub [T; 4]);

impl<T: Real> Vector4<T> {
    pub fn new(x0: T, x1: T, x2: T, x3: T) -> Self {
        Vector4([x0, x1, x2, x3])
    }

    pub fn zero() -> Self {
        Vector4([T::zero(); 4])
    }

    /// Standard basis vector `e_{i+1}` (zero-based index).
    pub fn basis(i: usize) -> Self {
        let mut v = Self::zero();
        v.0[i] = T::one();
        v
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

    pub fn scale(&self, k: T) -> Self {
        Vector4(self.0.map(|x| x * k))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }
}

impl<T> Index<usize> for Vector4<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vector4<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Real> Add for Vector4<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Vector4([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
            self.0[3] + rhs.0[3],
        ])
    }
}

impl<T: Real> Sub for Vector4<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Vector4([
            self.0[0] - rhs.0[0],
            self.0[1] - rhs.0[1],
            self.0[2] - rhs.0[2],
            self.0[3] - rhs.0[3],
        ])
    }
}

impl<T: Real> Mul<T> for Vector4<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        self.scale(k)
    }
}

impl<T: Real> Neg for Vector4<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Vector4(self.0.map(|x| -x))
    }
}
