//! The matrix phase space: quadruples (X, Y, v, w), the conjugation action,
//! complex and real moment maps, the metric moment map, and the two
//! antiholomorphic involutions with their rank-one level varieties.

use serde::{Deserialize, Serialize};

use crate::eigen::singular_values;
use crate::error::{CmError, Result};
use crate::matrix::{cvec_serde, vec_conj, vec_norm_sq, vec_scale, C64, ComplexMatrix, I};
use crate::tol::Tolerances;

/// A point of the big phase space: two matrices, a column and a row vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub n: usize,
    #[serde(rename = "X")]
    pub x: ComplexMatrix,
    #[serde(rename = "Y")]
    pub y: ComplexMatrix,
    #[serde(with = "cvec_serde")]
    pub v: Vec<C64>,
    #[serde(with = "cvec_serde")]
    pub w: Vec<C64>,
}

impl PhasePoint {
    pub fn new(x: ComplexMatrix, y: ComplexMatrix, v: Vec<C64>, w: Vec<C64>) -> Result<Self> {
        let n = x.size();
        if y.size() != n || v.len() != n || w.len() != n {
            return Err(CmError::ShapeMismatch {
                expected: n,
                got: y.size().max(v.len()).max(w.len()),
            });
        }
        Ok(Self { n, x, y, v, w })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            x: ComplexMatrix::zeros(n),
            y: ComplexMatrix::zeros(n),
            v: vec![C64::new(0.0, 0.0); n],
            w: vec![C64::new(0.0, 0.0); n],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && crate::matrix::vec_is_finite(&self.v)
            && crate::matrix::vec_is_finite(&self.w)
    }
}

/// Which rank-one level variety a reduced pair is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// Conjugate-transpose involution; level `i I_n`.
    TauForm,
    /// Entrywise-conjugation involution; level `-I_n`.
    SigmaForm,
}

/// A reduced point: matrix pair (X, Y) measured against a rank-one condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HatPoint {
    pub n: usize,
    #[serde(rename = "X")]
    pub x: ComplexMatrix,
    #[serde(rename = "Y")]
    pub y: ComplexMatrix,
    pub variant: Variant,
}

impl HatPoint {
    pub fn new(x: ComplexMatrix, y: ComplexMatrix, variant: Variant) -> Result<Self> {
        let n = x.size();
        if y.size() != n {
            return Err(CmError::ShapeMismatch {
                expected: n,
                got: y.size(),
            });
        }
        Ok(Self { n, x, y, variant })
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Frobenius distance between the (X, Y) blocks of two points.
    pub fn distance(&self, other: &HatPoint) -> f64 {
        (self.x.sub(&other.x).norm_sq() + self.y.sub(&other.y).norm_sq()).sqrt()
    }

    /// Largest deviation of (X, Y) from being a Hermitian pair.
    pub fn hermitian_defect(&self) -> f64 {
        self.x.hermitian_defect().max(self.y.hermitian_defect())
    }
}

/// Hermitian pair plus a column vector: a point of the real reduction model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HermitianTriple {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: ComplexMatrix,
    #[serde(rename = "B")]
    pub b: ComplexMatrix,
    #[serde(rename = "a_vec", with = "cvec_serde")]
    pub vec: Vec<C64>,
}

impl HermitianTriple {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix, vec: Vec<C64>, tol: &Tolerances) -> Result<Self> {
        let n = a.size();
        if b.size() != n || vec.len() != n {
            return Err(CmError::ShapeMismatch {
                expected: n,
                got: b.size().max(vec.len()),
            });
        }
        let defect = a.hermitian_defect().max(b.hermitian_defect());
        if defect > tol.membership {
            return Err(CmError::NotHermitian {
                defect,
                tol: tol.membership,
            });
        }
        Ok(Self { n, a, b, vec })
    }

    /// Embeds into the full phase space as (A, B, a, i a*).
    pub fn embed(&self) -> PhasePoint {
        let w = vec_scale(&vec_conj(&self.vec), I);
        PhasePoint {
            n: self.n,
            x: self.a.clone(),
            y: self.b.clone(),
            v: self.vec.clone(),
            w,
        }
    }

    /// The reduced pair, tagged with the tau-form rank condition.
    pub fn hat(&self) -> HatPoint {
        HatPoint {
            n: self.n,
            x: self.a.clone(),
            y: self.b.clone(),
            variant: Variant::TauForm,
        }
    }
}

/// An invertible matrix acting by simultaneous conjugation.
#[derive(Debug, Clone)]
pub struct GroupElement {
    g: ComplexMatrix,
    g_inv: ComplexMatrix,
}

impl GroupElement {
    /// Checks invertibility against a scale-aware floor `det_floor * ||g||^n`.
    pub fn new(g: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let n = g.size();
        let det_abs = g.det().norm();
        let floor = tol.det_floor * g.norm().powi(n as i32);
        if det_abs <= floor {
            return Err(CmError::SingularGroupElement { det_abs, floor });
        }
        let g_inv = g.inverse()?;
        Ok(Self { g, g_inv })
    }

    /// Builds from a matrix and a precomputed inverse (e.g. a Hermitian
    /// exponential and its negative-time exponential).
    pub fn from_parts(g: ComplexMatrix, g_inv: ComplexMatrix) -> Self {
        Self { g, g_inv }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.g
    }

    pub fn inverse_matrix(&self) -> &ComplexMatrix {
        &self.g_inv
    }

    pub fn size(&self) -> usize {
        self.g.size()
    }
}

/// The conjugation action `g . (X, Y, v, w) = (g X g^-1, g Y g^-1, g v, w g^-1)`.
pub fn group_act(g: &GroupElement, z: &PhasePoint) -> PhasePoint {
    let gm = g.matrix();
    let gi = g.inverse_matrix();
    PhasePoint {
        n: z.n,
        x: gm.mul(&z.x).mul(gi),
        y: gm.mul(&z.y).mul(gi),
        v: gm.mul_vec(&z.v),
        w: gi.vec_mul(&z.w),
    }
}

/// Conjugates a reduced pair: `(g X g^-1, g Y g^-1)`.
pub fn group_act_hat(g: &GroupElement, p: &HatPoint) -> HatPoint {
    let gm = g.matrix();
    let gi = g.inverse_matrix();
    HatPoint {
        n: p.n,
        x: gm.mul(&p.x).mul(gi),
        y: gm.mul(&p.y).mul(gi),
        variant: p.variant,
    }
}

/// Complex moment map `[X, Y] + v w`.
pub fn moment_map(z: &PhasePoint) -> ComplexMatrix {
    z.x.commutator(&z.y).add(&ComplexMatrix::outer(&z.v, &z.w))
}

/// Real moment map `[A, B] + i a a*` on Hermitian triples; skew-Hermitian.
pub fn moment_real(h: &HermitianTriple) -> ComplexMatrix {
    let aa = ComplexMatrix::outer(&h.vec, &vec_conj(&h.vec));
    h.a.commutator(&h.b).add(&aa.scale(I))
}

/// Metric moment map `mu_1 = ([X,X*] + [Y,Y*] + v v* - w* w) / 2`; Hermitian.
pub fn mu_one(z: &PhasePoint) -> ComplexMatrix {
    let cx = z.x.commutator(&z.x.adjoint());
    let cy = z.y.commutator(&z.y.adjoint());
    let vv = ComplexMatrix::outer(&z.v, &vec_conj(&z.v));
    let ww = ComplexMatrix::outer(&vec_conj(&z.w), &z.w);
    cx.add(&cy).add(&vv).sub(&ww).scale(C64::new(0.5, 0.0))
}

/// The involution `(X, Y, v, w) -> (X*, Y*, i w*, i v*)`.
pub fn tau(z: &PhasePoint) -> PhasePoint {
    PhasePoint {
        n: z.n,
        x: z.x.adjoint(),
        y: z.y.adjoint(),
        v: vec_scale(&vec_conj(&z.w), I),
        w: vec_scale(&vec_conj(&z.v), I),
    }
}

/// Reduced form of `tau`: `(X, Y) -> (X*, Y*)`.
pub fn tau_hat(p: &HatPoint) -> HatPoint {
    HatPoint {
        n: p.n,
        x: p.x.adjoint(),
        y: p.y.adjoint(),
        variant: p.variant,
    }
}

/// The entrywise-conjugation involution.
pub fn sigma(z: &PhasePoint) -> PhasePoint {
    PhasePoint {
        n: z.n,
        x: z.x.conj(),
        y: z.y.conj(),
        v: vec_conj(&z.v),
        w: vec_conj(&z.w),
    }
}

/// Reduced form of `sigma`: entrywise conjugation of the pair.
pub fn sigma_hat(p: &HatPoint) -> HatPoint {
    HatPoint {
        n: p.n,
        x: p.x.conj(),
        y: p.y.conj(),
        variant: p.variant,
    }
}

/// Squared norm `||X||^2 + ||Y||^2 + ||v||^2 + ||w||^2`.
pub fn norm_sq(z: &PhasePoint) -> f64 {
    z.x.norm_sq() + z.y.norm_sq() + vec_norm_sq(&z.v) + vec_norm_sq(&z.w)
}

/// Distance of the reduced pair from its rank-one variety: the second-largest
/// singular value of `[X,Y] - iI` (tau form) or `[X,Y] + I` (sigma form).
///
/// At n = 1 the rank condition is vacuous and the defect is `|s1 - 1|`, which
/// keeps level-set membership checkable for scalars.
pub fn rank_one_defect(p: &HatPoint) -> f64 {
    let target = match p.variant {
        Variant::TauForm => ComplexMatrix::scaled_identity(p.n, I),
        Variant::SigmaForm => ComplexMatrix::scaled_identity(p.n, C64::new(-1.0, 0.0)),
    };
    let m = p.x.commutator(&p.y).sub(&target);
    let sv = singular_values(&m);
    if p.n == 1 {
        (sv[0] - 1.0).abs()
    } else {
        sv[1]
    }
}

/// Asserts variety membership, returning the defect on failure.
pub fn require_on_variety(p: &HatPoint, tol: f64) -> Result<()> {
    let defect = rank_one_defect(p);
    if defect > tol {
        Err(CmError::OffVariety { defect, tol })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn scalar_point(x: f64, y: f64, v: C64, w: C64) -> PhasePoint {
        PhasePoint::new(
            ComplexMatrix::diagonal(&[c(x, 0.0)]),
            ComplexMatrix::diagonal(&[c(y, 0.0)]),
            vec![v],
            vec![w],
        )
        .unwrap()
    }

    #[test]
    fn group_act_identity_and_scalars() {
        let tol = Tolerances::default();
        let z = scalar_point(3.0, 4.0, c(1.0, 0.0), c(0.0, 1.0));
        let id = GroupElement::new(ComplexMatrix::identity(1), &tol).unwrap();
        assert_eq!(group_act(&id, &z), z);

        let two = GroupElement::new(ComplexMatrix::diagonal(&[c(2.0, 0.0)]), &tol).unwrap();
        let gz = group_act(&two, &z);
        assert_eq!(gz.x, z.x);
        assert_eq!(gz.y, z.y);
        assert_eq!(gz.v[0], c(2.0, 0.0));
        assert_eq!(gz.w[0], c(0.0, 0.5));
    }

    #[test]
    fn singular_group_element_rejected() {
        let tol = Tolerances::default();
        let m = ComplexMatrix::from_rows(2, vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(
            GroupElement::new(m, &tol),
            Err(CmError::SingularGroupElement { .. })
        ));
    }

    #[test]
    fn moment_map_scalar_and_rank_one() {
        let z = scalar_point(0.0, 0.0, c(1.0, 0.0), c(0.0, 1.0));
        let mu = moment_map(&z);
        assert_eq!(mu[(0, 0)], c(0.0, 1.0));

        let z2 = PhasePoint::new(
            ComplexMatrix::zeros(2),
            ComplexMatrix::zeros(2),
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        )
        .unwrap();
        let mu2 = moment_map(&z2);
        assert_eq!(mu2[(0, 0)], c(0.0, 1.0));
        assert_eq!(mu2[(0, 1)], c(0.0, 0.0));
        assert_eq!(mu2[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn moment_equivariance_random() {
        let mut s = Sampler::new(7);
        let tol = Tolerances::default();
        for n in [1usize, 2, 3] {
            for _ in 0..20 {
                let z = s.phase_point(n, 1.0);
                let g = GroupElement::new(s.invertible(n), &tol).unwrap();
                let lhs = moment_map(&group_act(&g, &z));
                let rhs = g.matrix().mul(&moment_map(&z)).mul(g.inverse_matrix());
                assert!(lhs.sub(&rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
            }
        }
    }

    #[test]
    fn mu_one_examples() {
        // n=1, z=(x, y, 1, -i): vv* - w*w = 1 - 1 = 0
        let z = scalar_point(0.7, -0.2, c(1.0, 0.0), c(0.0, -1.0));
        assert!(mu_one(&z).norm() < 1e-15);

        // only v: mu_1 = vv*/2
        let z2 = PhasePoint::new(
            ComplexMatrix::zeros(2),
            ComplexMatrix::zeros(2),
            vec![c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let m = mu_one(&z2);
        assert_eq!(m[(0, 0)], c(2.0, 0.0));
        assert_eq!(m[(0, 1)], c(0.0, -1.0));
        assert_eq!(m[(1, 1)], c(0.5, 0.0));
    }

    #[test]
    fn mu_one_vanishes_on_embedded_triples() {
        let mut s = Sampler::new(11);
        let tol = Tolerances::default();
        for n in [2usize, 3] {
            let h = HermitianTriple::new(
                s.hermitian(n, 1.0),
                s.hermitian(n, 1.0),
                s.cvector(n, 1.0),
                &tol,
            )
            .unwrap();
            let z = h.embed();
            assert!(mu_one(&z).norm() < 1e-14 * (1.0 + norm_sq(&z)));
            assert!(mu_one(&z).hermitian_defect() < 1e-12);
        }
    }

    #[test]
    fn involutions_are_involutive() {
        let mut s = Sampler::new(3);
        let z = s.phase_point(3, 1.0);
        assert_eq!(tau(&tau(&z)), z);
        assert_eq!(sigma(&sigma(&z)), z);
        assert_eq!(norm_sq(&tau(&z)), norm_sq(&z));
    }

    #[test]
    fn tau_fixes_embedded_triples() {
        let mut s = Sampler::new(5);
        let tol = Tolerances::default();
        let h = HermitianTriple::new(s.hermitian(2, 1.0), s.hermitian(2, 1.0), s.cvector(2, 1.0), &tol).unwrap();
        let z = h.embed();
        let tz = tau(&z);
        assert!(tz.x.sub(&z.x).norm() < 1e-15);
        assert!(tz.y.sub(&z.y).norm() < 1e-15);
        assert!(vec_norm_sq(&crate::matrix::vec_sub(&tz.v, &z.v)) < 1e-30);
        assert!(vec_norm_sq(&crate::matrix::vec_sub(&tz.w, &z.w)) < 1e-30);
    }

    #[test]
    fn tau_equivariance_random() {
        let mut s = Sampler::new(13);
        let tol = Tolerances::default();
        for n in [1usize, 2, 3] {
            for _ in 0..20 {
                let z = s.phase_point(n, 1.0);
                let g = GroupElement::new(s.invertible(n), &tol).unwrap();
                let gp = GroupElement::new(g.matrix().adjoint().inverse().unwrap(), &tol).unwrap();
                let lhs = tau(&group_act(&g, &z));
                let rhs = group_act(&gp, &tau(&z));
                let d = (lhs.x.sub(&rhs.x).norm_sq()
                    + lhs.y.sub(&rhs.y).norm_sq()
                    + vec_norm_sq(&crate::matrix::vec_sub(&lhs.v, &rhs.v))
                    + vec_norm_sq(&crate::matrix::vec_sub(&lhs.w, &rhs.w)))
                .sqrt();
                assert!(d < 1e-10 * (1.0 + norm_sq(&z)));
            }
        }
    }

    #[test]
    fn sigma_equivariance_random() {
        let mut s = Sampler::new(17);
        let tol = Tolerances::default();
        for _ in 0..20 {
            let z = s.phase_point(3, 1.0);
            let g = GroupElement::new(s.invertible(3), &tol).unwrap();
            let gbar = GroupElement::new(g.matrix().conj(), &tol).unwrap();
            let lhs = sigma(&group_act(&g, &z));
            let rhs = group_act(&gbar, &sigma(&z));
            let d = (lhs.x.sub(&rhs.x).norm_sq() + lhs.y.sub(&rhs.y).norm_sq()).sqrt();
            assert!(d < 1e-12 * (1.0 + norm_sq(&z)));
        }
    }

    #[test]
    fn tau_stabilizes_the_level_set() {
        // if mu(z) = iI + E then mu(tau z) = iI - E*, so the distance is preserved
        let mut s = Sampler::new(23);
        let tol = Tolerances::default();
        let h = HermitianTriple::new(s.hermitian(2, 1.0), s.hermitian(2, 1.0), s.cvector(2, 1.0), &tol).unwrap();
        let mut z = h.embed();
        // perturb slightly off the level set
        z.x = z.x.add(&s.complex_matrix(2, 1e-6));
        let target = ComplexMatrix::scaled_identity(2, I);
        let before = moment_map(&z).sub(&target).norm();
        let after = moment_map(&tau(&z)).sub(&target).norm();
        assert!(after <= 10.0 * before);
    }

    #[test]
    fn norm_sq_examples() {
        assert_eq!(norm_sq(&PhasePoint::zero(2)), 0.0);
        let z = scalar_point(1.0, 1.0, c(1.0, 0.0), c(1.0, 0.0));
        assert_eq!(norm_sq(&z), 4.0);
    }

    #[test]
    fn norm_invariant_under_unitaries() {
        let mut s = Sampler::new(29);
        let tol = Tolerances::default();
        for _ in 0..10 {
            let z = s.phase_point(3, 1.0);
            let u = GroupElement::new(s.unitary(3), &tol).unwrap();
            let uz = group_act(&u, &z);
            assert!((norm_sq(&uz) - norm_sq(&z)).abs() < 1e-10 * (1.0 + norm_sq(&z)));
        }
    }

    #[test]
    fn rank_one_defect_cases() {
        // n=1: single singular value of (-i) is 1, defect 0
        let p = HatPoint::new(
            ComplexMatrix::diagonal(&[c(0.3, 0.0)]),
            ComplexMatrix::diagonal(&[c(-1.2, 0.0)]),
            Variant::TauForm,
        )
        .unwrap();
        assert!(rank_one_defect(&p) < 1e-15);

        // X=Y=0 at n=2: [X,Y]-iI = -iI, both singular values 1, defect 1
        let q = HatPoint::new(ComplexMatrix::zeros(2), ComplexMatrix::zeros(2), Variant::TauForm).unwrap();
        assert!((rank_one_defect(&q) - 1.0).abs() < 1e-14);
    }
}
