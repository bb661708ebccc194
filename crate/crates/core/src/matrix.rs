//! Dense complex matrices and vectors, sized for desk-scale phase-space work.
//!
//! Everything is row-major `Vec<Complex64>` with `n <= 32`; no attempt is made
//! at sparsity or blocking. JSON serialization follows the wire convention:
//! a complex number is `[re, im]`, a matrix is a nested row-major array.

use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CmError, Result};

/// Complex scalar used throughout: a pair of 64-bit floats.
pub type C64 = Complex<f64>;

/// Imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest matrix size the library is designed for.
pub const MAX_SIZE: usize = 32;

/// Square complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for j in 0..n {
            m[(j, j)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Scalar multiple of the identity.
    pub fn scaled_identity(n: usize, c: C64) -> Self {
        let mut m = Self::zeros(n);
        for j in 0..n {
            m[(j, j)] = c;
        }
        m
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (j, &e) in entries.iter().enumerate() {
            m[(j, j)] = e;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds from a row-major slice of length `n*n`.
    pub fn from_rows(n: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(CmError::ShapeMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|j| self[(j, j)]).sum()
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |r, c| self[(c, r)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for c in 0..n {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        out
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Matrix-vector product `A v` with `v` a column.
    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        debug_assert_eq!(self.n, v.len());
        (0..self.n)
            .map(|r| (0..self.n).map(|c| self[(r, c)] * v[c]).sum())
            .collect()
    }

    /// Row-vector / matrix product `w A`.
    pub fn vec_mul(&self, w: &[C64]) -> Vec<C64> {
        debug_assert_eq!(self.n, w.len());
        (0..self.n)
            .map(|c| (0..self.n).map(|r| w[r] * self[(r, c)]).sum())
            .collect()
    }

    /// Rank-one outer product `v w` of a column and a row vector.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        debug_assert_eq!(v.len(), w.len());
        Self::from_fn(v.len(), |r, c| v[r] * w[c])
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Squared Frobenius norm `tr(A A*)`.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius distance to the conjugate transpose; zero for Hermitian matrices.
    pub fn hermitian_defect(&self) -> f64 {
        self.sub(&self.adjoint()).norm()
    }

    /// Largest imaginary part in absolute value.
    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// `(A + A*)/2`.
    pub fn hermitian_part(&self) -> Self {
        self.add(&self.adjoint()).scale(C64::new(0.5, 0.0))
    }

    /// LU factorization with partial pivoting; returns (lu, pivots, sign-swaps).
    fn lu(&self) -> (Vec<C64>, Vec<usize>, usize) {
        let n = self.n;
        let mut a = self.data.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].norm();
            for r in (k + 1)..n {
                let m = a[r * n + k].norm();
                if m > best {
                    best = m;
                    p = r;
                }
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                piv.swap(k, p);
                swaps += 1;
            }
            let pivot = a[k * n + k];
            if pivot.norm() == 0.0 {
                continue;
            }
            for r in (k + 1)..n {
                let f = a[r * n + k] / pivot;
                a[r * n + k] = f;
                for c in (k + 1)..n {
                    let akc = a[k * n + c];
                    a[r * n + c] -= f * akc;
                }
            }
        }
        (a, piv, swaps)
    }

    pub fn det(&self) -> C64 {
        let (lu, _, swaps) = self.lu();
        let mut d = if swaps % 2 == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        };
        for k in 0..self.n {
            d *= lu[k * self.n + k];
        }
        d
    }

    /// Inverse via LU; fails if a pivot is exactly zero.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let (lu, piv, _) = self.lu();
        for k in 0..n {
            if lu[k * n + k].norm() == 0.0 {
                return Err(CmError::SingularMatrix);
            }
        }
        let mut inv = Self::zeros(n);
        let mut col = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            for r in 0..n {
                col[r] = if piv[r] == j {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
            }
            // forward substitution (unit lower triangle)
            for r in 0..n {
                for c in 0..r {
                    let l = lu[r * n + c];
                    let x = col[c];
                    col[r] -= l * x;
                }
            }
            // back substitution
            for r in (0..n).rev() {
                for c in (r + 1)..n {
                    let u = lu[r * n + c];
                    let x = col[c];
                    col[r] -= u * x;
                }
                col[r] /= lu[r * n + r];
            }
            for r in 0..n {
                inv[(r, j)] = col[r];
            }
        }
        Ok(inv)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.n + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.n + c]
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.n)
            .map(|r| (0..self.n).map(|c| [self[(r, c)].re, self[(r, c)].im]).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let n = rows.len();
        let mut m = ComplexMatrix::zeros(n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(D::Error::custom("matrix rows must form a square"));
            }
            for (c, &[re, im]) in row.iter().enumerate() {
                m[(r, c)] = C64::new(re, im);
            }
        }
        Ok(m)
    }
}

/// Complex Euclidean squared norm of a vector.
pub fn vec_norm_sq(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn vec_sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_conj(v: &[C64]) -> Vec<C64> {
    v.iter().map(|z| z.conj()).collect()
}

pub fn vec_scale(v: &[C64], c: C64) -> Vec<C64> {
    v.iter().map(|z| z * c).collect()
}

pub fn vec_is_finite(v: &[C64]) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Serde helpers for `Vec<C64>` as `[[re, im], ...]`.
pub mod cvec_serde {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(d)?;
        Ok(pairs.iter().map(|&[re, im]| C64::new(re, im)).collect())
    }
}
