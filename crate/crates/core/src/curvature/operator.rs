use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{pair_index, CurvatureError, Plane, TwoForm, BASIS_LABELS, PAIRS, PHI_MINUS, PHI_PLUS};
use crate::numerics::{Frame4, NumericsError, SymMatrix3, SymMatrix4, SymMatrix6, Vector4};
use crate::scalar::Real;

/// Relative tolerance for symmetry and Bianchi validation.
pub const DEFAULT_VALIDATION_TOL: f64 = 1e-9;

/// Storage positions of the three entries coupled by the first Bianchi
/// identity, with their signs in the residual.
const BIANCHI_TERMS: [(usize, usize, i8); 3] = [(0, 5, 1), (1, 4, -1), (2, 3, 1)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuildOptions<T> {
    /// Replace the input by its orthogonal projection onto `{b = 0}`.
    pub project_bianchi: bool,
    /// Relative tolerance, scaled by `1 + max|M_ij|`.
    pub tolerance: T,
}

impl<T: Real> Default for BuildOptions<T> {
    fn default() -> Self {
        BuildOptions {
            project_bianchi: false,
            tolerance: T::tol(DEFAULT_VALIDATION_TOL),
        }
    }
}

impl<T: Real> BuildOptions<T> {
    pub fn projecting() -> Self {
        BuildOptions {
            project_bianchi: true,
            ..Self::default()
        }
    }
}

/// One tensor component `R_ijkl = value`, indices 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component<T> {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub value: T,
}

impl<T> Component<T> {
    pub fn new(i: usize, j: usize, k: usize, l: usize, value: T) -> Self {
        Component { i, j, k, l, value }
    }
}

/// Algebraic curvature tensor at a point of an oriented Riemannian 4-manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureOperator<T> {
    m: SymMatrix6<T>,
    bianchi: T,
}

impl<T: Real> CurvatureOperator<T> {
    /// Validated operator from a full 6×6 array in the 2-form basis.
    pub fn from_matrix(rows: [[T; 6]; 6], opts: BuildOptions<T>) -> Result<Self, CurvatureError> {
        let m = SymMatrix6::from_rows(rows, opts.tolerance).map_err(label_asymmetry)?;
        Self::from_sym(m, opts)
    }

    pub fn from_sym(m: SymMatrix6<T>, opts: BuildOptions<T>) -> Result<Self, CurvatureError> {
        let mut op = Self::unvalidated(m);
        if opts.project_bianchi {
            op = op.project_bianchi();
        } else {
            let tol = opts.tolerance * (T::one() + op.m.max_abs());
            if !(op.bianchi.abs() <= tol) {
                return Err(CurvatureError::BianchiViolation {
                    residual: op.bianchi.as_f64(),
                    tolerance: tol.as_f64(),
                });
            }
        }
        Ok(op)
    }

    /// Assembles the 6×6 form from tensor components. Components are related
    /// by `R_ijkl = −R_jikl = −R_ijlk = R_klij`; unlisted ones are zero.
    pub fn from_components(
        entries: &[Component<T>],
        opts: BuildOptions<T>,
    ) -> Result<Self, CurvatureError> {
        let mut seen: BTreeMap<(usize, usize), (T, Component<T>)> = BTreeMap::new();
        for c in entries {
            let idx = [c.i, c.j, c.k, c.l];
            if idx.iter().any(|&x| !(1..=4).contains(&x)) || !c.value.is_finite() {
                return Err(CurvatureError::IndexOutOfRange {
                    i: c.i,
                    j: c.j,
                    k: c.k,
                    l: c.l,
                });
            }
            let conflict = |expected: T| CurvatureError::SymmetryConflict {
                i: c.i,
                j: c.j,
                k: c.k,
                l: c.l,
                expected: expected.as_f64(),
                found: c.value.as_f64(),
            };
            let tol = |v: T| T::tol(1e-12) * (T::one() + v.abs());
            let (a, b) = match (pair_index(c.i - 1, c.j - 1), pair_index(c.k - 1, c.l - 1)) {
                (Some(a), Some(b)) => (a, b),
                // R_iikl and R_ijkk vanish by antisymmetry.
                _ if c.value.abs() <= tol(T::zero()) => continue,
                _ => return Err(conflict(T::zero())),
            };
            let sign = T::lit((a.1 * b.1) as f64);
            let key = (a.0.min(b.0), a.0.max(b.0));
            let value = c.value * sign;
            match seen.get(&key) {
                Some(&(prev, _)) if (prev - value).abs() > tol(prev) => {
                    return Err(conflict(prev * sign));
                }
                Some(_) => {}
                None => {
                    seen.insert(key, (value, *c));
                }
            }
        }
        let mut m = SymMatrix6::zeros();
        for (&(a, b), &(v, _)) in &seen {
            m.set(a, b, v);
        }
        Self::from_sym(m, opts)
    }

    /// Wraps a symmetric form without checking the Bianchi identity.
    ///
    /// Meant for studying merely symmetric operators; the residual is still
    /// recorded and available through [`Self::bianchi_residual`].
    pub fn unvalidated(m: SymMatrix6<T>) -> Self {
        let bianchi = BIANCHI_TERMS.iter().fold(T::zero(), |acc, &(i, j, s)| {
            acc + T::lit(s as f64) * m.get(i, j)
        });
        CurvatureOperator { m, bianchi }
    }

    /// Operator with the given blocks in the orthonormal `Λ+ ⊕ Λ−` basis.
    ///
    /// The result satisfies the Bianchi identity iff `trace(a) == trace(c)`.
    pub fn from_blocks(a: &SymMatrix3<T>, b: &[[T; 3]; 3], c: &SymMatrix3<T>) -> Self {
        // M = Φᵀ X Φ with Φ the orthonormal rows φ/√2.
        let phi: [[T; 6]; 6] = std::array::from_fn(|r| {
            let src = if r < 3 { PHI_PLUS[r] } else { PHI_MINUS[r - 3] };
            src.map(|x| T::lit(x as f64))
        });
        let x = |r: usize, s: usize| -> T {
            match (r < 3, s < 3) {
                (true, true) => a.get(r, s),
                (false, false) => c.get(r - 3, s - 3),
                (true, false) => b[r][s - 3],
                (false, true) => b[s][r - 3],
            }
        };
        let m = SymMatrix6::from_upper(|i, j| {
            let mut acc = T::zero();
            for r in 0..6 {
                for s in 0..6 {
                    acc = acc + phi[r][i] * x(r, s) * phi[s][j];
                }
            }
            acc * T::half()
        });
        Self::unvalidated(m)
    }

    pub fn matrix(&self) -> &SymMatrix6<T> {
        &self.m
    }

    pub fn rows(&self) -> [[T; 6]; 6] {
        *self.m.rows()
    }

    pub fn max_abs(&self) -> T {
        self.m.max_abs()
    }

    /// `b = M[e12,e34] − M[e13,e24] + M[e14,e23]`.
    pub fn bianchi_residual(&self) -> T {
        self.bianchi
    }

    /// Orthogonal projection onto `b = 0` in the 21 independent entries:
    /// each coupled entry moves by `∓b/3`.
    pub fn project_bianchi(&self) -> Self {
        let shift = self.bianchi / T::lit(3.0);
        let mut m = self.m;
        for &(i, j, s) in &BIANCHI_TERMS {
            m.set(i, j, m.get(i, j) - T::lit(s as f64) * shift);
        }
        Self::unvalidated(m)
    }

    pub fn apply(&self, w: &TwoForm<T>) -> TwoForm<T> {
        TwoForm(self.m.mul_vec(&w.0))
    }

    /// `⟨M α, β⟩`.
    pub fn pairing(&self, a: &TwoForm<T>, b: &TwoForm<T>) -> T {
        self.m.bilinear(&a.0, &b.0)
    }

    /// `R(x, y, z, w) = ⟨M(x∧y), z∧w⟩`.
    pub fn evaluate(&self, x: &Vector4<T>, y: &Vector4<T>, z: &Vector4<T>, w: &Vector4<T>) -> T {
        self.pairing(&TwoForm::wedge(x, y), &TwoForm::wedge(z, w))
    }

    /// `s = 2·trace(M)`.
    pub fn scalar_curvature(&self) -> T {
        T::two() * self.m.trace()
    }

    /// `Ric_ik = Σ_j ⟨M(e_i∧e_j), e_k∧e_j⟩`.
    pub fn ricci(&self) -> SymMatrix4<T> {
        SymMatrix4::from_upper(|i, k| {
            (0..4).fold(T::zero(), |acc, j| {
                match (pair_index(i, j), pair_index(k, j)) {
                    (Some((a, sa)), Some((b, sb))) => {
                        acc + T::lit((sa * sb) as f64) * self.m.get(a, b)
                    }
                    _ => acc,
                }
            })
        })
    }

    /// Sectional curvature `K(P) = ⟨M(u∧v), u∧v⟩`.
    pub fn sectional(&self, p: &Plane<T>) -> T {
        let w = p.two_form();
        self.pairing(&w, &w)
    }

    /// Biorthogonal curvature `(K(P) + K(P⊥))/2`, with `P⊥` carried by `⋆(u∧v)`.
    pub fn biorthogonal(&self, p: &Plane<T>) -> T {
        let w = p.two_form();
        let s = w.star();
        (self.pairing(&w, &w) + self.pairing(&s, &s)) * T::half()
    }

    /// Isotropic curvature of a frame:
    /// `K13 + K14 + K23 + K24 − 2·R(f1, f2, f3, f4)`.
    pub fn isotropic(&self, f: &Frame4<T>) -> T {
        let [f1, f2, f3, f4] = &f.rows;
        let k = |x, y| {
            let w = TwoForm::wedge(x, y);
            self.pairing(&w, &w)
        };
        k(f1, f3) + k(f1, f4) + k(f2, f3) + k(f2, f4) - T::two() * self.evaluate(f1, f2, f3, f4)
    }

    /// The same tensor expressed in the orthonormal frame `q`:
    /// `M'[(ij),(kl)] = R(q_i, q_j, q_k, q_l)`.
    pub fn change_frame(&self, q: &Frame4<T>) -> Self {
        let forms: [TwoForm<T>; 6] = PAIRS.map(|(i, j)| TwoForm::wedge(&q.rows[i], &q.rows[j]));
        let images: [TwoForm<T>; 6] = forms.map(|w| self.apply(&w));
        Self::unvalidated(SymMatrix6::from_upper(|a, b| images[a].dot(&forms[b])))
    }
}

fn label_asymmetry(e: NumericsError) -> CurvatureError {
    match e {
        NumericsError::Asymmetric { row, col, diff } => CurvatureError::Asymmetric {
            row: BASIS_LABELS[row],
            col: BASIS_LABELS[col],
            diff,
        },
        other => CurvatureError::Numerics(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{random_frame4, RngStream};

    fn identity() -> CurvatureOperator<f64> {
        CurvatureOperator::from_matrix(*SymMatrix6::identity().rows(), BuildOptions::default())
            .unwrap()
    }

    fn single_coupling() -> [[f64; 6]; 6] {
        let mut m = SymMatrix6::zeros();
        m.set(0, 5, 1.0);
        *m.rows()
    }

    #[test]
    fn identity_is_valid() {
        assert_eq!(identity().bianchi_residual(), 0.0);
    }

    #[test]
    fn lone_coupling_violates_bianchi() {
        let err = CurvatureOperator::from_matrix(single_coupling(), BuildOptions::default());
        assert!(
            matches!(err, Err(CurvatureError::BianchiViolation { residual, .. }) if residual == 1.0)
        );
        assert_eq!(
            CurvatureOperator::unvalidated(SymMatrix6::from_rows(single_coupling(), 0.0).unwrap())
                .bianchi_residual(),
            1.0
        );
    }

    #[test]
    fn projection_moves_each_coupling_by_a_third() {
        let op =
            CurvatureOperator::from_matrix(single_coupling(), BuildOptions::projecting()).unwrap();
        let m = op.matrix();
        assert!((m.get(0, 5) - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.get(1, 4) - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.get(2, 3) + 1.0 / 3.0).abs() < 1e-15);
        assert!(op.bianchi_residual().abs() <= 1e-15);
    }

    #[test]
    fn projection_is_minimal_norm() {
        // The correction is parallel to the residual's gradient (1, −1, 1) in
        // the three coupled coordinates, so any other b = 0 point is farther.
        let before = SymMatrix6::from_rows(single_coupling(), 0.0).unwrap();
        let after = CurvatureOperator::unvalidated(before).project_bianchi();
        let d = |m: &SymMatrix6<f64>| {
            BIANCHI_TERMS
                .iter()
                .map(|&(i, j, _)| (m.get(i, j) - before.get(i, j)).powi(2))
                .sum::<f64>()
        };
        let best = d(after.matrix());
        let mut other = before;
        other.set(0, 5, 0.0);
        assert!(best < d(&other));
        assert!((best - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn asymmetry_names_basis_labels() {
        let mut rows = *SymMatrix6::<f64>::identity().rows();
        rows[1][3] = 0.5;
        let err = CurvatureOperator::from_matrix(rows, BuildOptions::default()).unwrap_err();
        assert_eq!(
            err,
            CurvatureError::Asymmetric {
                row: "e13",
                col: "e23",
                diff: 0.5
            }
        );
        assert!(err.to_string().contains("(e13,e23)"));
    }

    #[test]
    fn components_single_entry() {
        let op = CurvatureOperator::from_components(
            &[Component::new(1, 2, 1, 2, 1.0)],
            BuildOptions::default(),
        )
        .unwrap();
        let mut want = SymMatrix6::zeros();
        want.set(0, 0, 1.0);
        assert_eq!(*op.matrix(), want);
    }

    #[test]
    fn components_conflicting_sign() {
        let err = CurvatureOperator::from_components(
            &[
                Component::new(1, 2, 1, 2, 1.0),
                Component::new(2, 1, 1, 2, 1.0),
            ],
            BuildOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            CurvatureError::SymmetryConflict { i: 2, j: 1, expected, .. } if expected == -1.0
        ));
        // The consistent value is accepted.
        CurvatureOperator::from_components(
            &[
                Component::new(1, 2, 1, 2, 1.0),
                Component::new(2, 1, 1, 2, -1.0),
            ],
            BuildOptions::default(),
        )
        .unwrap();
    }

    #[test]
    fn components_round_sphere() {
        let entries: Vec<_> = PAIRS
            .iter()
            .map(|&(i, j)| Component::new(i + 1, j + 1, i + 1, j + 1, 1.0))
            .collect();
        let op = CurvatureOperator::from_components(&entries, BuildOptions::default()).unwrap();
        assert_eq!(*op.matrix(), SymMatrix6::identity());
    }

    #[test]
    fn components_index_errors() {
        for bad in [
            Component::new(0, 1, 1, 2, 1.0),
            Component::new(1, 2, 1, 5, 1.0),
        ] {
            assert!(matches!(
                CurvatureOperator::from_components(&[bad], BuildOptions::default()),
                Err(CurvatureError::IndexOutOfRange { .. })
            ));
        }
        assert!(matches!(
            CurvatureOperator::from_components(
                &[Component::new(1, 1, 1, 2, 1.0)],
                BuildOptions::default()
            ),
            Err(CurvatureError::SymmetryConflict { .. })
        ));
    }

    #[test]
    fn unit_sphere_scalar_and_ricci() {
        let op = identity();
        assert_eq!(op.scalar_curvature(), 12.0);
        assert_eq!(op.ricci(), SymMatrix4::scaled_identity(3.0));
    }

    #[test]
    fn r_times_s3_ricci() {
        let op = CurvatureOperator::from_sym(
            SymMatrix6::diagonal([1.0, 1.0, 0.0, 1.0, 0.0, 0.0]),
            BuildOptions::default(),
        )
        .unwrap();
        assert_eq!(op.scalar_curvature(), 6.0);
        assert_eq!(op.ricci(), SymMatrix4::diagonal([2.0, 2.0, 2.0, 0.0]));
    }

    #[test]
    fn product_of_unit_surfaces() {
        let op = CurvatureOperator::from_sym(
            SymMatrix6::diagonal([1.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
            BuildOptions::default(),
        )
        .unwrap();
        assert_eq!(op.scalar_curvature(), 4.0);
        assert_eq!(op.sectional(&Plane::coordinate(0, 2)), 0.0);
        assert_eq!(op.biorthogonal(&Plane::coordinate(0, 2)), 0.0);
        assert_eq!(op.biorthogonal(&Plane::coordinate(0, 1)), 1.0);
    }

    #[test]
    fn sectional_is_basis_independent() {
        let mut r = RngStream::new(2, 0);
        let op = CurvatureOperator::from_sym(
            SymMatrix6::from_upper(|_, _| r.gaussian::<f64>()),
            BuildOptions::projecting(),
        )
        .unwrap();
        for _ in 0..100 {
            let p = Plane::from_frame(&random_frame4::<f64>(&mut r));
            let t: f64 = r.uniform::<f64>() * 6.3;
            let (c, s) = (t.cos(), t.sin());
            let q = Plane::new(p.u() * c + p.v() * s, p.v() * c - p.u() * s).unwrap();
            assert!((op.sectional(&p) - op.sectional(&q)).abs() <= 1e-10);
            let via_complement = 0.5 * (op.sectional(&p) + op.sectional(&p.complement()));
            assert!((op.biorthogonal(&p) - via_complement).abs() <= 1e-12);
            assert!((op.biorthogonal(&p) - op.biorthogonal(&p.complement())).abs() <= 1e-12);
        }
    }

    #[test]
    fn unit_sphere_is_isotropically_four() {
        let op = identity();
        let mut r = RngStream::new(8, 0);
        for _ in 0..50 {
            assert!((op.isotropic(&random_frame4(&mut r)) - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn change_frame_of_identity_is_identity() {
        let op = identity();
        let f: Frame4<f64> = random_frame4(&mut RngStream::new(4, 0));
        assert!(op.change_frame(&f).matrix().max_abs_diff(op.matrix()) < 1e-14);
        let e = Vector4::basis(0);
        assert_eq!(
            op.evaluate(&e, &Vector4::basis(1), &e, &Vector4::basis(1)),
            1.0
        );
    }
}
