//! Coordinates and representatives on the reduced space: the trace-coordinate
//! embedding, the global real chart, real-form detection, norm-minimizing
//! orbit representatives, and the exhaustion function with its sublevel sets.

use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::eigen::{exp_hermitian, hermitian_eigen};
use crate::error::{CmError, Result};
use crate::matrix::{vec_scale, C64, ComplexMatrix, I};
use crate::phase::{
    group_act, moment_map, moment_real, mu_one, norm_sq, require_on_variety, GroupElement,
    HatPoint, HermitianTriple, PhasePoint, Variant,
};
use crate::sampling::Sampler;
use crate::tol::Tolerances;

/// Trace-coordinate vector: `tr X^j Y^k` over all pairs with `1 <= j+k <= d`,
/// ordered lexicographically in `(j+k, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceCoords {
    pub n: usize,
    pub d: usize,
    pub values: Vec<C64>,
}

/// The pair order shared by every consumer: ascending total degree, then
/// ascending X-power.
pub fn pair_order(d: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(coord_len(d));
    for total in 1..=d {
        for j in 0..=total {
            pairs.push((j, total - j));
        }
    }
    pairs
}

/// Number of coordinates at degree cap `d`: `d (d + 3) / 2`.
pub fn coord_len(d: usize) -> usize {
    d * (d + 3) / 2
}

impl TraceCoords {
    pub fn sup_distance(&self, other: &TraceCoords) -> Result<f64> {
        if self.values.len() != other.values.len() {
            return Err(CmError::LengthMismatch {
                left: self.values.len(),
                right: other.values.len(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn dist_sq(&self, other: &TraceCoords) -> Result<f64> {
        if self.values.len() != other.values.len() {
            return Err(CmError::LengthMismatch {
                left: self.values.len(),
                right: other.values.len(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum())
    }

    pub fn conj(&self) -> TraceCoords {
        TraceCoords {
            n: self.n,
            d: self.d,
            values: self.values.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

impl Serialize for TraceCoords {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TraceCoords", 4)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("pairs", &pair_order(self.d))?;
        let values: Vec<[f64; 2]> = self.values.iter().map(|z| [z.re, z.im]).collect();
        st.serialize_field("values", &values)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for TraceCoords {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            d: usize,
            #[serde(default)]
            pairs: Option<Vec<(usize, usize)>>,
            values: Vec<[f64; 2]>,
        }
        let raw = Raw::deserialize(d)?;
        if let Some(p) = &raw.pairs {
            if *p != pair_order(raw.d) {
                return Err(serde::de::Error::custom("pairs are not in canonical order"));
            }
        }
        if raw.values.len() != coord_len(raw.d) {
            return Err(serde::de::Error::custom("value count does not match degree cap"));
        }
        Ok(TraceCoords {
            n: raw.n,
            d: raw.d,
            values: raw.values.iter().map(|&[re, im]| C64::new(re, im)).collect(),
        })
    }
}

/// Global coordinates on the real form: strictly decreasing `x`, free `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealChart {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl RealChart {
    pub fn distance(&self, other: &RealChart) -> f64 {
        self.x
            .iter()
            .chain(&self.y)
            .zip(other.x.iter().chain(&other.y))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Evaluates all `tr X^j Y^k`, `1 <= j+k <= d`, at a reduced point.
pub fn trace_embedding(p: &HatPoint, d: usize) -> TraceCoords {
    let n = p.n;
    // powers X^0..X^d, Y^0..Y^d
    let mut xp: Vec<ComplexMatrix> = Vec::with_capacity(d + 1);
    let mut yp: Vec<ComplexMatrix> = Vec::with_capacity(d + 1);
    xp.push(ComplexMatrix::identity(n));
    yp.push(ComplexMatrix::identity(n));
    for k in 1..=d {
        xp.push(xp[k - 1].mul(&p.x));
        yp.push(yp[k - 1].mul(&p.y));
    }
    let values = pair_order(d)
        .into_iter()
        .map(|(j, k)| {
            let a = &xp[j];
            let b = &yp[k];
            let mut t = C64::new(0.0, 0.0);
            for r in 0..n {
                for c in 0..n {
                    t += a[(r, c)] * b[(c, r)];
                }
            }
            t
        })
        .collect();
    TraceCoords { n, d, values }
}

/// Orbit equality test through the invariant embedding at degree cap `n^2`.
pub fn same_orbit(p: &HatPoint, q: &HatPoint, tol: f64) -> Result<bool> {
    require_on_variety(p, tol)?;
    require_on_variety(q, tol)?;
    let d = p.n * p.n;
    let ep = trace_embedding(p, d);
    let eq = trace_embedding(q, d);
    Ok(ep.sup_distance(&eq)? < tol)
}

/// True when the point sits on the real form: on the variety and with real
/// trace coordinates up to `tol`.
pub fn is_real_form(p: &HatPoint, tol: f64) -> Result<bool> {
    require_on_variety(p, tol.max(1e-8))?;
    let emb = trace_embedding(p, p.n * p.n);
    Ok(emb.max_imag() < tol)
}

/// Builds the Hermitian triple of a chart point: `A = diag(x)`,
/// `B[j][k] = -i/(x_j - x_k)` off the diagonal with `y` on it, `a = (1,...,1)`.
pub fn chart_to_point(c: &RealChart, tol: &Tolerances) -> Result<HermitianTriple> {
    let n = c.x.len();
    if c.y.len() != n {
        return Err(CmError::LengthMismatch {
            left: n,
            right: c.y.len(),
        });
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let gap = c.x[j] - c.x[k];
            if gap < tol.separation {
                return Err(CmError::ChartCollision {
                    gap,
                    floor: tol.separation,
                });
            }
        }
    }
    let a = ComplexMatrix::diagonal(&c.x.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
    let mut b = ComplexMatrix::zeros(n);
    for j in 0..n {
        b[(j, j)] = C64::new(c.y[j], 0.0);
        for k in 0..n {
            if j != k {
                b[(j, k)] = -I / C64::new(c.x[j] - c.x[k], 0.0);
            }
        }
    }
    let ones = vec![C64::new(1.0, 0.0); n];
    HermitianTriple::new(a, b, ones, tol)
}

/// Recovers chart coordinates from a triple on the moment level set.
pub fn point_to_chart(h: &HermitianTriple, tol: &Tolerances) -> Result<RealChart> {
    let n = h.n;
    let target = ComplexMatrix::scaled_identity(n, I);
    let distance = moment_real(h).sub(&target).norm();
    if distance > tol.membership {
        return Err(CmError::OffLevelSet {
            distance,
            tol: tol.membership,
        });
    }
    let eig = hermitian_eigen(&h.a);
    for w in eig.values.windows(2) {
        let gap = w[0] - w[1];
        if gap < tol.separation {
            return Err(CmError::ChartCollision {
                gap,
                floor: tol.separation,
            });
        }
    }
    let u = &eig.vectors;
    let b1 = u.adjoint().mul(&h.b).mul(u);
    let a1 = u.adjoint().mul_vec(&h.vec);
    for (j, aj) in a1.iter().enumerate() {
        let dev = (aj.norm() - 1.0).abs();
        if dev > 10.0 * tol.membership.max(1e-10) {
            return Err(CmError::NotOnRealForm {
                reason: format!("component {j} of the frame vector has modulus 1 {dev:+.3e}"),
            });
        }
    }
    // rephasing a to the all-ones vector leaves the diagonal of B untouched
    let y: Vec<f64> = (0..n).map(|j| b1[(j, j)].re).collect();
    Ok(RealChart { x: eig.values, y })
}

/// Sigma-variant chart: a real matrix pair on the `-I` rank-one variety,
/// `A = diag(x)`, `B[j][k] = 1/(x_j - x_k)` off-diagonal, `y` on the diagonal.
pub fn sigma_chart_pair(c: &RealChart, tol: &Tolerances) -> Result<HatPoint> {
    let n = c.x.len();
    if c.y.len() != n {
        return Err(CmError::LengthMismatch {
            left: n,
            right: c.y.len(),
        });
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let gap = c.x[j] - c.x[k];
            if gap < tol.separation {
                return Err(CmError::ChartCollision {
                    gap,
                    floor: tol.separation,
                });
            }
        }
    }
    let a = ComplexMatrix::diagonal(&c.x.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
    let mut b = ComplexMatrix::zeros(n);
    for j in 0..n {
        b[(j, j)] = C64::new(c.y[j], 0.0);
        for k in 0..n {
            if j != k {
                b[(j, k)] = C64::new(1.0 / (c.x[j] - c.x[k]), 0.0);
            }
        }
    }
    HatPoint::new(a, b, Variant::SigmaForm)
}

/// Options for the norm-minimizing orbit representative search.
#[derive(Debug, Clone)]
pub struct NormalizeOptions {
    /// Stop once `||mu_1||` falls below this.
    pub target: f64,
    pub max_iterations: usize,
    /// Armijo backtracking for the fallback steepest-descent steps: initial
    /// step, shrink factor, slope constant. Newton steps start at 1.
    pub step_init: f64,
    pub step_shrink: f64,
    pub slope_const: f64,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        Self {
            target: 1e-8,
            max_iterations: 500,
            step_init: 1e-1,
            step_shrink: 0.5,
            slope_const: 1e-4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NormalizeReport {
    pub point: PhasePoint,
    pub iterations: usize,
    pub defect: f64,
}

/// Orthonormal basis of the real vector space of Hermitian n x n matrices
/// under `<A, B> = Re tr(A B)`.
pub fn hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(n * n);
    for j in 0..n {
        let mut e = ComplexMatrix::zeros(n);
        e[(j, j)] = C64::new(1.0, 0.0);
        basis.push(e);
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..n {
        for k in (j + 1)..n {
            let mut s = ComplexMatrix::zeros(n);
            s[(j, k)] = C64::new(r, 0.0);
            s[(k, j)] = C64::new(r, 0.0);
            basis.push(s);
            let mut a = ComplexMatrix::zeros(n);
            a[(j, k)] = C64::new(0.0, r);
            a[(k, j)] = C64::new(0.0, -r);
            basis.push(a);
        }
    }
    basis
}

/// Derivative of `mu_1` along the infinitesimal action of a Hermitian `k`:
/// the linearization of the metric moment map used as the geodesic Hessian.
fn mu_one_action_derivative(z: &PhasePoint, k: &ComplexMatrix) -> ComplexMatrix {
    let dx = k.commutator(&z.x);
    let dy = k.commutator(&z.y);
    let dv = k.mul_vec(&z.v);
    let dw = vec_scale(&k.vec_mul(&z.w), C64::new(-1.0, 0.0));
    let part_x = dx.commutator(&z.x.adjoint()).add(&z.x.commutator(&dx.adjoint()));
    let part_y = dy.commutator(&z.y.adjoint()).add(&z.y.commutator(&dy.adjoint()));
    let vconj = crate::matrix::vec_conj(&z.v);
    let dvconj = crate::matrix::vec_conj(&dv);
    let part_v = ComplexMatrix::outer(&dv, &vconj).add(&ComplexMatrix::outer(&z.v, &dvconj));
    let wconj = crate::matrix::vec_conj(&z.w);
    let dwconj = crate::matrix::vec_conj(&dw);
    let part_w = ComplexMatrix::outer(&dwconj, &z.w).add(&ComplexMatrix::outer(&wconj, &dw));
    part_x
        .add(&part_y)
        .add(&part_v)
        .sub(&part_w)
        .scale(C64::new(0.5, 0.0))
}

/// Moves a level-set point to the norm-minimizing representative of its orbit.
///
/// The squared norm along `exp(sK) . z` with `K` Hermitian has derivative
/// `4 <K, mu_1(z)>` at `s = 0` and is convex in `s`, so `mu_1 = 0` marks the
/// minimum. Each iteration recenters at the current point, takes a damped
/// Newton step (geodesic Hessian from the analytic linearization of `mu_1`,
/// steepest descent as fallback) and backtracks with the Armijo rule.
/// Conjugation leaves the trace coordinates of (X, Y) fixed.
pub fn orbit_normalize(
    z: &PhasePoint,
    opts: &NormalizeOptions,
    tol: &Tolerances,
) -> Result<NormalizeReport> {
    let n = z.n;
    let target = ComplexMatrix::scaled_identity(n, I);
    let distance = moment_map(z).sub(&target).norm();
    if distance > tol.membership.max(1e-6) {
        return Err(CmError::OffLevelSet {
            distance,
            tol: tol.membership.max(1e-6),
        });
    }

    let basis = hermitian_basis(n);
    let dim = basis.len();
    let mut cur = z.clone();
    let mut best_defect = f64::INFINITY;
    for iter in 0..opts.max_iterations {
        let grad_mat = mu_one(&cur);
        let defect = grad_mat.norm();
        best_defect = best_defect.min(defect);
        if defect <= opts.target {
            return Ok(NormalizeReport {
                point: cur,
                iterations: iter,
                defect,
            });
        }

        // gradient and Hessian in basis coordinates
        let grad: Vec<f64> = basis
            .iter()
            .map(|e| 4.0 * e.mul(&grad_mat).trace().re)
            .collect();
        let mut hess = ComplexMatrix::zeros(dim);
        for (b, eb) in basis.iter().enumerate() {
            let dmu = mu_one_action_derivative(&cur, eb);
            for (a, ea) in basis.iter().enumerate() {
                hess[(a, b)] = C64::new(4.0 * ea.mul(&dmu).trace().re, 0.0);
            }
        }
        // symmetrize and damp
        let hess = hess.add(&hess.transpose()).scale(C64::new(0.5, 0.0));
        let ridge = 1e-12 * hess.norm().max(1.0);
        let mut damped = hess;
        for a in 0..dim {
            damped[(a, a)] += C64::new(ridge, 0.0);
        }

        let newton_coords: Option<Vec<f64>> = damped.inverse().ok().map(|inv| {
            (0..dim)
                .map(|a| -(0..dim).map(|b| inv[(a, b)].re * grad[b]).sum::<f64>())
                .collect()
        });

        // prefer the Newton direction when it is a descent direction
        let (dir_coords, init_step) = match newton_coords {
            Some(coords) => {
                let slope: f64 = coords.iter().zip(&grad).map(|(d, g)| d * g).sum();
                if slope < 0.0 {
                    (coords, 1.0)
                } else {
                    (grad.iter().map(|g| -g).collect(), opts.step_init)
                }
            }
            None => (grad.iter().map(|g| -g).collect(), opts.step_init),
        };
        let slope: f64 = dir_coords.iter().zip(&grad).map(|(d, g)| d * g).sum();
        let mut direction = ComplexMatrix::zeros(n);
        for (c, e) in dir_coords.iter().zip(&basis) {
            direction = direction.add(&e.scale(C64::new(*c, 0.0)));
        }

        let p0 = norm_sq(&cur);
        let mut step = init_step;
        let mut moved = false;
        while step > 1e-18 {
            let g = GroupElement::from_parts(
                exp_hermitian(&direction, step),
                exp_hermitian(&direction, -step),
            );
            let cand = group_act(&g, &cur);
            if norm_sq(&cand) <= p0 + opts.slope_const * step * slope {
                cur = cand;
                moved = true;
                break;
            }
            step *= opts.step_shrink;
        }
        if !moved {
            break;
        }
    }
    let final_defect = mu_one(&cur).norm();
    if final_defect <= opts.target {
        return Ok(NormalizeReport {
            point: cur,
            iterations: opts.max_iterations,
            defect: final_defect,
        });
    }
    Err(CmError::NonConvergence {
        iterations: opts.max_iterations,
        best_defect: best_defect.min(final_defect),
    })
}

/// Base point and radius for the exhaustion function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExhaustionConfig {
    /// Trace coordinates of a fixed real-form base point.
    pub base: TraceCoords,
    /// Sublevel radius.
    pub radius: f64,
}

impl ExhaustionConfig {
    pub fn new(base: TraceCoords, radius: f64, tol: &Tolerances) -> Result<Self> {
        let imag = base.max_imag();
        if imag > tol.membership {
            return Err(CmError::NotOnRealForm {
                reason: format!("base point has imaginary parts up to {imag:.3e}"),
            });
        }
        Ok(Self { base, radius })
    }

    /// Canonical base: the chart with `x = (n-1, n-3, ..., -(n-1))`, `y = 0`.
    pub fn default_base(n: usize, d: usize, tol: &Tolerances) -> Result<TraceCoords> {
        let chart = default_base_chart(n);
        let h = chart_to_point(&chart, tol)?;
        Ok(trace_embedding(&h.hat(), d))
    }
}

/// The well-separated canonical chart used as the exhaustion base point.
pub fn default_base_chart(n: usize) -> RealChart {
    RealChart {
        x: (0..n).map(|j| (n as f64 - 1.0) - 2.0 * j as f64).collect(),
        y: vec![0.0; n],
    }
}

/// `rho(p) = ||p - p0||^2 + ||conj(p) - p0||^2` in trace coordinates.
pub fn exhaustion_rho(c: &TraceCoords, cfg: &ExhaustionConfig) -> Result<f64> {
    Ok(c.dist_sq(&cfg.base)? + c.conj().dist_sq(&cfg.base)?)
}

/// Closed sublevel membership `rho(p) <= R`.
pub fn in_sublevel(c: &TraceCoords, cfg: &ExhaustionConfig) -> Result<bool> {
    Ok(exhaustion_rho(c, cfg)? <= cfg.radius)
}

/// Draws real-form points inside the sublevel set `Z_R` by rejection around
/// the base chart; the perturbation window shrinks if acceptance stalls.
pub fn sample_sublevel(
    n: usize,
    cfg: &ExhaustionConfig,
    count: usize,
    sampler: &mut Sampler,
    tol: &Tolerances,
) -> Result<Vec<HatPoint>> {
    let base = default_base_chart(n);
    let mut out = Vec::with_capacity(count);
    let mut window = 0.5f64;
    let mut stall = 0usize;
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 200_000 {
            return Err(CmError::Invalid(format!(
                "sublevel sampling stalled: {} of {count} accepted",
                out.len()
            )));
        }
        let mut x: Vec<f64> = base
            .x
            .iter()
            .map(|&b| b + sampler.uniform(-window, window))
            .collect();
        x.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if x.windows(2).any(|w| w[0] - w[1] < 0.2) {
            continue;
        }
        let y: Vec<f64> = (0..n).map(|_| sampler.uniform(-window, window)).collect();
        let chart = RealChart { x, y };
        let h = chart_to_point(&chart, tol)?;
        let hat = h.hat();
        let emb = trace_embedding(&hat, cfg.base.d);
        if exhaustion_rho(&emb, cfg)? <= cfg.radius {
            out.push(hat);
            stall = 0;
        } else {
            stall += 1;
            if stall > 2000 {
                window *= 0.5;
                stall = 0;
            }
        }
    }
    Ok(out)
}
