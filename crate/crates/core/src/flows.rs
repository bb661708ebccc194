//! Hamiltonian vector fields of trace polynomials on reduced pairs, the four
//! complete generator flows in closed form, a Runge-Kutta reference
//! integrator, pointwise Poisson brackets, and the defect measurements used
//! to certify symplecticity and real-form compatibility.
//!
//! Sign convention, shared by every module and pinned by test: with
//! `omega((E1,F1),(E2,F2)) = tr(E1 F2 - E2 F1)` the Hamiltonian field is
//! `(Xdot, Ydot) = (grad_Y H, -grad_X H)`, and the bracket is
//! `{H1, H2} = tr(grad_Y H1 . grad_X H2 - grad_X H1 . grad_Y H2)`,
//! so `{tr X, tr Y} = -n`.

use serde::{Deserialize, Serialize};

use crate::error::{CmError, Result};
use crate::matrix::{C64, ComplexMatrix};
use crate::phase::{tau_hat, HatPoint};
use crate::poly::TracePolynomial;

/// Recorded value of `{tr X, tr Y}` at n = 2; guards against silent
/// sign-convention drift.
pub const BRACKET_TRX_TRY_N2: f64 = -2.0;

/// The four complete Hamiltonian generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeneratorId {
    /// `tr Y`
    TrY,
    /// `tr Y^2`
    TrY2,
    /// `tr X^3`
    TrX3,
    /// `(tr X)^2`
    #[serde(rename = "TrX_sq")]
    TrXSq,
}

impl GeneratorId {
    pub const ALL: [GeneratorId; 4] = [
        GeneratorId::TrY,
        GeneratorId::TrY2,
        GeneratorId::TrX3,
        GeneratorId::TrXSq,
    ];

    pub fn hamiltonian(self) -> TracePolynomial {
        use crate::poly::Letter::{X, Y};
        let one = C64::new(1.0, 0.0);
        match self {
            GeneratorId::TrY => TracePolynomial::monomial(one, vec![Y]),
            GeneratorId::TrY2 => TracePolynomial::monomial(one, vec![Y, Y]),
            GeneratorId::TrX3 => TracePolynomial::monomial(one, vec![X, X, X]),
            GeneratorId::TrXSq => TracePolynomial::product(one, vec![X], vec![X]),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GeneratorId::TrY => "TrY",
            GeneratorId::TrY2 => "TrY2",
            GeneratorId::TrX3 => "TrX3",
            GeneratorId::TrXSq => "TrX_sq",
        }
    }
}

/// Holomorphic tangent vector at a reduced pair.
#[derive(Debug, Clone)]
pub struct TangentPair {
    pub dx: ComplexMatrix,
    pub dy: ComplexMatrix,
}

impl TangentPair {
    pub fn norm(&self) -> f64 {
        (self.dx.norm_sq() + self.dy.norm_sq()).sqrt()
    }
}

/// `(grad_X H, grad_Y H)` with the pairing `dH(E,F) = tr(grad_X E + grad_Y F)`.
pub fn cyclic_gradient(h: &TracePolynomial, p: &HatPoint) -> TangentPair {
    let (gx, gy) = h.cyclic_gradient(&p.x, &p.y);
    TangentPair { dx: gx, dy: gy }
}

/// The Hamiltonian vector field `(grad_Y H, -grad_X H)`.
pub fn hamiltonian_field(h: &TracePolynomial, p: &HatPoint) -> TangentPair {
    let (gx, gy) = h.cyclic_gradient(&p.x, &p.y);
    TangentPair {
        dx: gy,
        dy: gx.scale(C64::new(-1.0, 0.0)),
    }
}

/// Pointwise Poisson bracket
/// `{H1,H2}(p) = tr(grad_Y H1 . grad_X H2 - grad_X H1 . grad_Y H2)`.
pub fn poisson_bracket(h1: &TracePolynomial, h2: &TracePolynomial, p: &HatPoint) -> C64 {
    let (gx1, gy1) = h1.cyclic_gradient(&p.x, &p.y);
    let (gx2, gy2) = h2.cyclic_gradient(&p.x, &p.y);
    gy1.mul(&gx2).trace() - gx1.mul(&gy2).trace()
}

/// Closed-form complete flow of a generator for (possibly complex) time `t`.
///
/// All four leave the commutator `[X, Y]` untouched, so the rank-one defect
/// is preserved to rounding.
pub fn generator_flow(gen: GeneratorId, t: C64, p: &HatPoint) -> HatPoint {
    let n = p.n;
    let (x, y) = match gen {
        GeneratorId::TrY => (
            p.x.add(&ComplexMatrix::scaled_identity(n, t)),
            p.y.clone(),
        ),
        GeneratorId::TrY2 => (p.x.add(&p.y.scale(t * 2.0)), p.y.clone()),
        GeneratorId::TrX3 => (
            p.x.clone(),
            p.y.sub(&p.x.mul(&p.x).scale(t * 3.0)),
        ),
        GeneratorId::TrXSq => (
            p.x.clone(),
            p.y.sub(&ComplexMatrix::scaled_identity(n, t * 2.0 * p.x.trace())),
        ),
    };
    HatPoint {
        n,
        x,
        y,
        variant: p.variant,
    }
}

/// Real-time convenience wrapper.
pub fn generator_flow_real(gen: GeneratorId, t: f64, p: &HatPoint) -> HatPoint {
    generator_flow(gen, C64::new(t, 0.0), p)
}

/// Classical fourth-order Runge-Kutta along the Hamiltonian field of `h`.
///
/// Used as the oracle every closed form and splitting program is measured
/// against; error is O(steps^-4).
pub fn reference_flow(h: &TracePolynomial, t: f64, p: &HatPoint, steps: usize) -> Result<HatPoint> {
    let steps = steps.max(1);
    let dt = t / steps as f64;
    let mut cur = p.clone();
    for step in 0..steps {
        cur = rk4_step(h, &cur, dt);
        if !cur.is_finite() {
            return Err(CmError::BlowUp { step });
        }
    }
    Ok(cur)
}

fn rk4_step(h: &TracePolynomial, p: &HatPoint, dt: f64) -> HatPoint {
    let half = 0.5 * dt;
    let k1 = hamiltonian_field(h, p);
    let k2 = hamiltonian_field(h, &offset(p, &k1, half));
    let k3 = hamiltonian_field(h, &offset(p, &k2, half));
    let k4 = hamiltonian_field(h, &offset(p, &k3, dt));
    let sixth = dt / 6.0;
    let dx = k1
        .dx
        .add(&k2.dx.scale(C64::new(2.0, 0.0)))
        .add(&k3.dx.scale(C64::new(2.0, 0.0)))
        .add(&k4.dx)
        .scale(C64::new(sixth, 0.0));
    let dy = k1
        .dy
        .add(&k2.dy.scale(C64::new(2.0, 0.0)))
        .add(&k3.dy.scale(C64::new(2.0, 0.0)))
        .add(&k4.dy)
        .scale(C64::new(sixth, 0.0));
    HatPoint {
        n: p.n,
        x: p.x.add(&dx),
        y: p.y.add(&dy),
        variant: p.variant,
    }
}

fn offset(p: &HatPoint, v: &TangentPair, s: f64) -> HatPoint {
    let c = C64::new(s, 0.0);
    HatPoint {
        n: p.n,
        x: p.x.add(&v.dx.scale(c)),
        y: p.y.add(&v.dy.scale(c)),
        variant: p.variant,
    }
}

// ---------------------------------------------------------------------------
// Entry coordinates, finite-difference Jacobians and defect measurements.

/// Flattens (X, Y) into `2 n^2` complex entry coordinates, X block first,
/// both row-major.
pub fn coords_of(p: &HatPoint) -> Vec<C64> {
    let mut out = Vec::with_capacity(2 * p.n * p.n);
    out.extend_from_slice(p.x.entries());
    out.extend_from_slice(p.y.entries());
    out
}

/// Rebuilds a point from entry coordinates, reusing size and variant of a
/// template.
pub fn point_from_coords(coords: &[C64], template: &HatPoint) -> HatPoint {
    let n = template.n;
    let nn = n * n;
    let x = ComplexMatrix::from_rows(n, coords[..nn].to_vec()).unwrap();
    let y = ComplexMatrix::from_rows(n, coords[nn..].to_vec()).unwrap();
    HatPoint {
        n,
        x,
        y,
        variant: template.variant,
    }
}

/// Complex Jacobian of a holomorphic point map in entry coordinates, by
/// central differences with real step `h`.
pub fn fd_jacobian(map: &dyn Fn(&HatPoint) -> HatPoint, p: &HatPoint, h: f64) -> ComplexMatrix {
    let base = coords_of(p);
    let dim = base.len();
    let mut jac = ComplexMatrix::zeros(dim);
    for j in 0..dim {
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[j] += C64::new(h, 0.0);
        minus[j] -= C64::new(h, 0.0);
        let fp = coords_of(&map(&point_from_coords(&plus, p)));
        let fm = coords_of(&map(&point_from_coords(&minus, p)));
        for i in 0..dim {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

/// The symplectic pairing matrix in entry coordinates: `X_{jk}` pairs with
/// `Y_{kj}`, giving `omega(u1, u2) = u1^T Omega u2`.
pub fn omega_matrix(n: usize) -> ComplexMatrix {
    let nn = n * n;
    let mut omega = ComplexMatrix::zeros(2 * nn);
    for r in 0..n {
        for c in 0..n {
            let x_idx = r * n + c;
            let y_idx = c * n + r;
            omega[(x_idx, nn + y_idx)] = C64::new(1.0, 0.0);
            omega[(nn + y_idx, x_idx)] = C64::new(-1.0, 0.0);
        }
    }
    omega
}

/// `max |(J^T Omega J - Omega)|` for the finite-difference Jacobian of `map`
/// at `p`; zero (up to FD error) exactly when the map preserves the form.
pub fn symplectic_defect(map: &dyn Fn(&HatPoint) -> HatPoint, p: &HatPoint, h: f64) -> f64 {
    let jac = fd_jacobian(map, p, h);
    let omega = omega_matrix(p.n);
    let lhs = jac.transpose().mul(&omega).mul(&jac);
    lhs.sub(&omega).max_abs()
}

/// `||map(tau(p)) - tau(map(p))||` with `tau(X,Y) = (X*, Y*)`; zero for
/// real-time flows of real-coefficient Hamiltonians.
pub fn tau_compat_defect(map: &dyn Fn(&HatPoint) -> HatPoint, p: &HatPoint) -> f64 {
    let a = map(&tau_hat(p));
    let b = tau_hat(&map(p));
    a.distance(&b)
}
