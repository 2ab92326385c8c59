use serde::{Deserialize, Serialize};

use super::{CurvatureError, CurvatureOperator, PHI_MINUS, PHI_PLUS};
use crate::numerics::{Spectrum3, SymMatrix3, SymMatrix4};
use crate::scalar::Real;

/// Scalar, Ricci and Weyl parts of a curvature operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureDecomposition<T> {
    pub scalar: T,
    pub ricci: SymMatrix4<T>,
    pub traceless_ricci: SymMatrix4<T>,
    /// Self-dual Weyl part `W⁺ = A − (s/12)·I`.
    pub wplus: SymMatrix3<T>,
    /// Anti-self-dual Weyl part `W⁻ = C − (s/12)·I`.
    pub wminus: SymMatrix3<T>,
    /// Off-diagonal block `B : Λ− → Λ+`, rows indexed by `Λ+`.
    pub mixed: [[T; 3]; 3],
}

impl<T: Real> CurvatureDecomposition<T> {
    pub fn wplus_spectrum(&self) -> Result<Spectrum3<T>, CurvatureError> {
        Ok(self.wplus.spectrum()?)
    }

    pub fn wminus_spectrum(&self) -> Result<Spectrum3<T>, CurvatureError> {
        Ok(self.wminus.spectrum()?)
    }

    /// The `Λ+` diagonal block `A`.
    pub fn plus_block(&self) -> SymMatrix3<T> {
        self.wplus
            .add(&SymMatrix3::scaled_identity(self.scalar / T::lit(12.0)))
    }

    /// The `Λ−` diagonal block `C`.
    pub fn minus_block(&self) -> SymMatrix3<T> {
        self.wminus
            .add(&SymMatrix3::scaled_identity(self.scalar / T::lit(12.0)))
    }

    pub fn mixed_max_abs(&self) -> T {
        crate::scalar::max_abs(self.mixed.iter().flatten().copied())
    }

    pub fn is_einstein(&self, tol: T) -> bool {
        self.traceless_ricci.max_abs() <= tol
    }
}

/// The biorthogonal curvature spectrum `K₁⊥ ≤ K₂⊥ ≤ K₃⊥` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiorthoSpectrum<T> {
    pub k1: T,
    pub k2: T,
    pub k3: T,
}

impl<T: Real> BiorthoSpectrum<T> {
    /// `K_i⊥ = s/12 + (w_i⁺ + w_i⁻)/2`.
    pub fn from_weyl(scalar: T, wplus: &Spectrum3<T>, wminus: &Spectrum3<T>) -> Self {
        let base = scalar / T::lit(12.0);
        let k = |i: usize| base + (wplus[i] + wminus[i]) * T::half();
        BiorthoSpectrum {
            k1: k(0),
            k2: k(1),
            k3: k(2),
        }
    }

    pub fn sum(&self) -> T {
        self.k1 + self.k2 + self.k3
    }

    pub fn values(&self) -> [T; 3] {
        [self.k1, self.k2, self.k3]
    }
}

impl<T: Real> CurvatureOperator<T> {
    /// Splits the operator along `Λ² = Λ+ ⊕ Λ−`.
    pub fn decompose(&self) -> CurvatureDecomposition<T> {
        let m = self.matrix();
        // ⟨M φ, ψ⟩/2 for the integer (norm √2) basis vectors.
        let block = |x: &[i8; 6], y: &[i8; 6]| -> T {
            let mut acc = T::zero();
            for (i, &xi) in x.iter().enumerate() {
                if xi == 0 {
                    continue;
                }
                for (j, &yj) in y.iter().enumerate() {
                    if yj != 0 {
                        acc = acc + T::lit((xi * yj) as f64) * m.get(i, j);
                    }
                }
            }
            acc * T::half()
        };
        let scalar = self.scalar_curvature();
        let shift = SymMatrix3::scaled_identity(scalar / T::lit(12.0));
        let a = SymMatrix3::from_upper(|r, s| block(&PHI_PLUS[r], &PHI_PLUS[s]));
        let c = SymMatrix3::from_upper(|r, s| block(&PHI_MINUS[r], &PHI_MINUS[s]));
        let mixed =
            std::array::from_fn(|r| std::array::from_fn(|s| block(&PHI_PLUS[r], &PHI_MINUS[s])));
        let ricci = self.ricci();
        let traceless_ricci = ricci.sub(&SymMatrix4::scaled_identity(scalar / T::lit(4.0)));
        CurvatureDecomposition {
            scalar,
            ricci,
            traceless_ricci,
            wplus: a.sub(&shift),
            wminus: c.sub(&shift),
            mixed,
        }
    }

    /// Closed-form biorthogonal spectrum from the Weyl eigenvalues.
    ///
    /// `K₂⊥` is taken from the middle eigenvalues and cross-checked against
    /// `s/4 − K₁⊥ − K₃⊥`; a mismatch means the decomposition itself is broken
    /// and is reported as [`CurvatureError::InternalConsistency`].
    pub fn biortho_spectrum(&self) -> Result<BiorthoSpectrum<T>, CurvatureError> {
        let d = self.decompose();
        let spec =
            BiorthoSpectrum::from_weyl(d.scalar, &d.wplus_spectrum()?, &d.wminus_spectrum()?);
        let via_sum = d.scalar / T::lit(4.0) - spec.k1 - spec.k3;
        let discrepancy = (spec.k2 - via_sum).abs();
        let tol = T::tol(1e-12) * (T::one() + d.scalar.abs() + self.max_abs());
        if !(discrepancy <= tol) {
            return Err(CurvatureError::InternalConsistency {
                what: "middle biorthogonal curvature disagrees with s/4 - K1 - K3",
                discrepancy: discrepancy.as_f64(),
            });
        }
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{BuildOptions, Plane};
    use crate::numerics::{random_frame4, RngStream, SymMatrix6};

    fn op(m: SymMatrix6<f64>) -> CurvatureOperator<f64> {
        CurvatureOperator::from_sym(m, BuildOptions::default()).unwrap()
    }

    fn random_op(r: &mut RngStream) -> CurvatureOperator<f64> {
        CurvatureOperator::from_sym(
            SymMatrix6::from_upper(|_, _| r.gaussian::<f64>()),
            BuildOptions::projecting(),
        )
        .unwrap()
    }

    #[test]
    fn sphere_has_no_weyl_or_traceless_ricci() {
        let d = op(SymMatrix6::identity()).decompose();
        assert_eq!(d.scalar, 12.0);
        assert_eq!(d.wplus, SymMatrix3::zeros());
        assert_eq!(d.wminus, SymMatrix3::zeros());
        assert_eq!(d.traceless_ricci, SymMatrix4::zeros());
        assert_eq!(d.mixed_max_abs(), 0.0);
    }

    #[test]
    fn product_of_surfaces_weyl_by_hand() {
        // A = C = diag(1, 0, 0), s/12 = 1/3.
        let d = op(SymMatrix6::diagonal([1.0, 0.0, 0.0, 0.0, 0.0, 1.0])).decompose();
        assert_eq!(d.scalar, 4.0);
        let want = [-1.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0];
        for spec in [d.wplus_spectrum().unwrap(), d.wminus_spectrum().unwrap()] {
            for (g, w) in spec.values().iter().zip(want) {
                assert!((g - w).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn block_trace_difference_is_twice_bianchi() {
        let mut r = RngStream::new(17, 0);
        for _ in 0..200 {
            let m = SymMatrix6::from_upper(|_, _| r.gaussian::<f64>());
            let o = CurvatureOperator::unvalidated(m);
            let d = o.decompose();
            let diff = d.plus_block().trace() - d.minus_block().trace();
            assert!((diff - 2.0 * o.bianchi_residual()).abs() <= 1e-12 * (1.0 + m.max_abs()));
        }
    }

    #[test]
    fn validated_weyl_parts_are_traceless() {
        let mut r = RngStream::new(18, 0);
        for _ in 0..200 {
            let o = random_op(&mut r);
            let d = o.decompose();
            let tol = 1e-10 * (1.0 + o.max_abs());
            assert!(d.wplus.trace().abs() <= tol);
            assert!(d.wminus.trace().abs() <= tol);
            assert!(d.traceless_ricci.trace().abs() <= tol);
            assert!((d.scalar - 2.0 * o.matrix().trace()).abs() <= 1e-12 * d.scalar.abs());
            assert!((d.ricci.trace() - d.scalar).abs() <= 1e-12 * (1.0 + d.scalar.abs()));
        }
    }

    #[test]
    fn blocks_round_trip() {
        let mut r = RngStream::new(19, 0);
        let o = random_op(&mut r);
        let d = o.decompose();
        let back = CurvatureOperator::from_blocks(&d.plus_block(), &d.mixed, &d.minus_block());
        assert!(back.matrix().max_abs_diff(o.matrix()) < 1e-13);
    }

    #[test]
    fn mixed_block_vanishes_with_traceless_ricci() {
        let mut r = RngStream::new(20, 0);
        for _ in 0..50 {
            let d = random_op(&mut r).decompose();
            let einstein =
                CurvatureOperator::from_blocks(&d.plus_block(), &[[0.0; 3]; 3], &d.minus_block());
            let e = einstein.decompose();
            assert!(e.traceless_ricci.max_abs() <= 1e-12 * (1.0 + einstein.max_abs()));
            assert!(e.mixed_max_abs() <= 1e-10);
            // Conversely, a non-zero mixed block shows up in traceless Ricci.
            if d.mixed_max_abs() > 1e-6 {
                assert!(d.traceless_ricci.max_abs() > 1e-8);
            }
        }
    }

    #[test]
    fn traceless_ricci_does_not_affect_biorthogonal_curvature() {
        let mut r = RngStream::new(22, 0);
        for _ in 0..20 {
            let o = random_op(&mut r);
            let d = o.decompose();
            let b: [[f64; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| r.gaussian()));
            let perturbed = CurvatureOperator::from_blocks(
                &d.plus_block(),
                &std::array::from_fn(|i| std::array::from_fn(|j| d.mixed[i][j] + b[i][j])),
                &d.minus_block(),
            );
            for _ in 0..20 {
                let p = Plane::from_frame(&random_frame4(&mut r));
                assert!((o.biorthogonal(&p) - perturbed.biorthogonal(&p)).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn spectrum_sums_to_quarter_scalar() {
        let mut r = RngStream::new(23, 0);
        for _ in 0..500 {
            let o = random_op(&mut r);
            let k = o.biortho_spectrum().unwrap();
            let s = o.scalar_curvature();
            assert!(k.k1 <= k.k2 && k.k2 <= k.k3);
            assert!((k.sum() - s / 4.0).abs() <= 1e-12 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn single_precision_sphere() {
        let o = CurvatureOperator::<f32>::from_sym(SymMatrix6::identity(), BuildOptions::default())
            .unwrap();
        let k = o.biortho_spectrum().unwrap();
        assert_eq!(k.values(), [1.0f32; 3]);
    }
}
