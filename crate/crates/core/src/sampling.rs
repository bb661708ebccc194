//! Seeded random inputs for tests, verification suites and region sampling.
//!
//! One `Sampler` per experiment, constructed from an explicit seed, so every
//! suite is reproducible run to run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{C64, ComplexMatrix};
use crate::phase::PhasePoint;
use crate::space::RealChart;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let u1: f64 = self.rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = self.rng.gen::<f64>();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn complex(&mut self, scale: f64) -> C64 {
        C64::new(self.normal() * scale, self.normal() * scale)
    }

    pub fn cvector(&mut self, n: usize, scale: f64) -> Vec<C64> {
        (0..n).map(|_| self.complex(scale)).collect()
    }

    pub fn complex_matrix(&mut self, n: usize, scale: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, |_, _| self.complex(scale))
    }

    /// Random matrix with real entries only.
    pub fn real_matrix(&mut self, n: usize, scale: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, |_, _| C64::new(self.normal() * scale, 0.0))
    }

    pub fn hermitian(&mut self, n: usize, scale: f64) -> ComplexMatrix {
        let m = self.complex_matrix(n, scale);
        m.hermitian_part()
    }

    pub fn phase_point(&mut self, n: usize, scale: f64) -> PhasePoint {
        PhasePoint {
            n,
            x: self.complex_matrix(n, scale),
            y: self.complex_matrix(n, scale),
            v: self.cvector(n, scale),
            w: self.cvector(n, scale),
        }
    }

    /// Random invertible matrix; redraws on the rare numerically singular draw.
    pub fn invertible(&mut self, n: usize) -> ComplexMatrix {
        loop {
            let m = self.complex_matrix(n, 1.0);
            if m.det().norm() > 1e-6 * m.norm().powi(n as i32).max(f64::MIN_POSITIVE) {
                return m;
            }
        }
    }

    /// Haar-ish unitary from modified Gram-Schmidt of a Gaussian matrix.
    pub fn unitary(&mut self, n: usize) -> ComplexMatrix {
        loop {
            let m = self.complex_matrix(n, 1.0);
            if let Some(q) = gram_schmidt(&m) {
                return q;
            }
        }
    }

    /// Matrix with prescribed condition number: `U diag(s) V*` with singular
    /// values log-spaced between `sqrt(cond)` and `1/sqrt(cond)`.
    pub fn conditioned(&mut self, n: usize, cond: f64) -> ComplexMatrix {
        let u = self.unitary(n);
        let v = self.unitary(n);
        let mut d = ComplexMatrix::zeros(n);
        for j in 0..n {
            let f = if n == 1 {
                1.0
            } else {
                let t = j as f64 / (n - 1) as f64;
                cond.sqrt() * cond.powf(-t)
            };
            d[(j, j)] = C64::new(f, 0.0);
        }
        u.mul(&d).mul(&v.adjoint())
    }

    /// Chart coordinates with strictly decreasing x and a minimum gap.
    pub fn chart(&mut self, n: usize, x_range: (f64, f64), min_gap: f64, y_range: (f64, f64)) -> RealChart {
        loop {
            let mut x: Vec<f64> = (0..n).map(|_| self.uniform(x_range.0, x_range.1)).collect();
            x.sort_by(|a, b| b.partial_cmp(a).unwrap());
            if x.windows(2).all(|w| w[0] - w[1] >= min_gap) {
                let y: Vec<f64> = (0..n).map(|_| self.uniform(y_range.0, y_range.1)).collect();
                return RealChart { x, y };
            }
        }
    }
}

fn gram_schmidt(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = m.size();
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|c| (0..n).map(|r| m[(r, c)]).collect())
        .collect();
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let proj: C64 = (0..n).map(|r| cols[k][r].conj() * cols[j][r]).sum();
                for r in 0..n {
                    let t = proj * cols[k][r];
                    cols[j][r] -= t;
                }
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        for r in 0..n {
            cols[j][r] /= norm;
        }
    }
    Some(ComplexMatrix::from_fn(n, |r, c| cols[c][r]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let mut s = Sampler::new(1);
        let u = s.unitary(4);
        let d = u.adjoint().mul(&u).sub(&ComplexMatrix::identity(4)).norm();
        assert!(d < 1e-12);
    }

    #[test]
    fn conditioned_matrix_hits_target() {
        let mut s = Sampler::new(2);
        let g = s.conditioned(3, 100.0);
        let k = crate::eigen::condition_number(&g);
        assert!((k - 100.0).abs() < 1e-6 * 100.0);
    }

    #[test]
    fn chart_is_sorted_with_gaps() {
        let mut s = Sampler::new(3);
        let c = s.chart(5, (-5.0, 5.0), 0.5, (-5.0, 5.0));
        assert!(c.x.windows(2).all(|w| w[0] - w[1] >= 0.5));
    }

    #[test]
    fn seeded_sampler_is_reproducible() {
        let a = Sampler::new(42).complex_matrix(3, 1.0);
        let b = Sampler::new(42).complex_matrix(3, 1.0);
        assert_eq!(a, b);
    }
}
