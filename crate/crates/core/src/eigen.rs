//! Deterministic dense decompositions: cyclic Jacobi for Hermitian
//! eigenproblems and one-sided Jacobi for singular values.
//!
//! Cyclic sweeps in a fixed (p, q) order, no randomized pivoting, so repeated
//! runs on the same input produce identical output. One-sided Jacobi keeps
//! high relative accuracy on tiny singular values, which the rank-one defect
//! checks rely on.

use crate::matrix::{C64, ComplexMatrix};

const MAX_SWEEPS: usize = 64;

/// Result of a Hermitian eigendecomposition `A = U diag(values) U*`.
///
/// Eigenvalues are sorted in decreasing order; `vectors` holds the matching
/// eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Diagonalizes the Hermitian part of `a` by cyclic complex Jacobi rotations.
///
/// The caller is responsible for `a` being Hermitian up to rounding; the
/// strictly lower part is not consulted independently.
pub fn hermitian_eigen(a: &ComplexMatrix) -> HermitianEigen {
    let n = a.size();
    let mut m = a.hermitian_part();
    let mut u = ComplexMatrix::identity(n);
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let stop = 1e-30 * scale;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                apply_rotation(&mut m, &mut u, p, q, phase, c, s);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|j| m[(j, j)].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());
    let values: Vec<f64> = order.iter().map(|&j| diag[j]).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| u[(r, order[c])]);
    HermitianEigen { values, vectors }
}

/// Two-sided update `M <- J* M J`, `U <- U J` where `J` mixes columns p and q:
/// `col_p' = (phase c) col_p - s col_q`, `col_q' = (phase s) col_p + c col_q`.
fn apply_rotation(
    m: &mut ComplexMatrix,
    u: &mut ComplexMatrix,
    p: usize,
    q: usize,
    phase: C64,
    c: f64,
    s: f64,
) {
    let n = m.size();
    let pc = phase * c;
    let ps = phase * s;
    // columns of M
    for r in 0..n {
        let mp = m[(r, p)];
        let mq = m[(r, q)];
        m[(r, p)] = pc * mp - s * mq;
        m[(r, q)] = ps * mp + c * mq;
    }
    // rows of M (conjugated coefficients)
    let pcc = pc.conj();
    let psc = ps.conj();
    for col in 0..n {
        let rp = m[(p, col)];
        let rq = m[(q, col)];
        m[(p, col)] = pcc * rp - s * rq;
        m[(q, col)] = psc * rp + c * rq;
    }
    // accumulate U
    for r in 0..n {
        let up = u[(r, p)];
        let uq = u[(r, q)];
        u[(r, p)] = pc * up - s * uq;
        u[(r, q)] = ps * up + c * uq;
    }
}

/// Singular values of `a` in decreasing order, by one-sided Jacobi
/// orthogonalization of columns.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let n = a.size();
    let mut b = a.clone();
    let scale = b.norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON * scale;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0f64;
                let mut beta = 0.0f64;
                let mut gamma = C64::new(0.0, 0.0);
                for r in 0..n {
                    let bp = b[(r, p)];
                    let bq = b[(r, q)];
                    alpha += bp.norm_sqr();
                    beta += bq.norm_sqr();
                    gamma += bp.conj() * bq;
                }
                let mag = gamma.norm();
                if mag <= eps * eps || mag <= 1e-3 * f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / mag;
                let tau = (beta - alpha) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let pc = phase * c;
                let ps = phase * s;
                for r in 0..n {
                    let bp = b[(r, p)];
                    let bq = b[(r, q)];
                    b[(r, p)] = pc * bp - s * bq;
                    b[(r, q)] = ps * bp + c * bq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = (0..n)
        .map(|c| (0..n).map(|r| b[(r, c)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// Ratio of extreme singular values; infinite when the smallest vanishes.
pub fn condition_number(a: &ComplexMatrix) -> f64 {
    let sv = singular_values(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    if smin == 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// `exp(t H)` for Hermitian `H`, through the eigendecomposition.
pub fn exp_hermitian(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let n = h.size();
    let eig = hermitian_eigen(h);
    let u = &eig.vectors;
    // U diag(e^{t lambda}) U*
    let mut scaled = ComplexMatrix::zeros(n);
    for c in 0..n {
        let e = (t * eig.values[c]).exp();
        for r in 0..n {
            scaled[(r, c)] = u[(r, c)] * e;
        }
    }
    scaled.mul(&u.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexMatrix;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigen_reconstructs_hermitian_input() {
        let a = ComplexMatrix::from_rows(
            3,
            vec![
                c(2.0, 0.0), c(1.0, 1.0), c(0.0, -0.5),
                c(1.0, -1.0), c(-1.0, 0.0), c(0.3, 0.0),
                c(0.0, 0.5), c(0.3, 0.0), c(0.7, 0.0),
            ],
        )
        .unwrap();
        let eig = hermitian_eigen(&a);
        let lambda = ComplexMatrix::diagonal(
            &eig.values.iter().map(|&v| c(v, 0.0)).collect::<Vec<_>>(),
        );
        let back = eig.vectors.mul(&lambda).mul(&eig.vectors.adjoint());
        assert!(back.sub(&a).norm() < 1e-13 * a.norm().max(1.0));
        assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        // unitarity of the eigenvector matrix
        let utu = eig.vectors.adjoint().mul(&eig.vectors);
        assert!(utu.sub(&ComplexMatrix::identity(3)).norm() < 1e-13);
    }

    #[test]
    fn singular_values_of_known_matrices() {
        // nilpotent [[0,2],[0,0]] has singular values (2, 0)
        let a = ComplexMatrix::from_rows(2, vec![c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let sv = singular_values(&a);
        assert!((sv[0] - 2.0).abs() < 1e-14);
        assert!(sv[1].abs() < 1e-14);

        // -i I has singular values (1, 1)
        let b = ComplexMatrix::scaled_identity(2, c(0.0, -1.0));
        let sv = singular_values(&b);
        assert!((sv[0] - 1.0).abs() < 1e-14 && (sv[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_one_second_singular_value_is_tiny() {
        // outer product of two vectors: exactly rank one
        let v = [c(1.0, 0.5), c(-0.3, 2.0), c(0.0, 1.0)];
        let w = [c(0.7, 0.0), c(0.2, -0.4), c(1.5, 1.0)];
        let a = ComplexMatrix::outer(&v, &w);
        let sv = singular_values(&a);
        assert!(sv[1] < 1e-14 * sv[0]);
        assert!(sv[2] < 1e-14 * sv[0]);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let h = ComplexMatrix::zeros(3);
        let e = exp_hermitian(&h, 1.0);
        assert!(e.sub(&ComplexMatrix::identity(3)).norm() < 1e-15);
    }

    #[test]
    fn exp_adds_along_commuting_times() {
        let h = ComplexMatrix::from_rows(2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(-0.5, 0.0)]).unwrap();
        let e1 = exp_hermitian(&h, 0.3);
        let e2 = exp_hermitian(&h, -0.3);
        assert!(e1.mul(&e2).sub(&ComplexMatrix::identity(2)).norm() < 1e-13);
    }
}
