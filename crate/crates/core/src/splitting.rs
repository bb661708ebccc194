//! Splitting calculus: finite programs of complete generator flows, the sum
//! and commutator algorithms, iterated composition, recipe realization, and
//! pointwise C^0/C^1 seminorms between point maps.
//!
//! A program is an ordered list of (generator, real time) steps applied left
//! to right. The negative-time program of a composite is its reversed,
//! time-negated list, which is the exact inverse map; the commutator
//! construction below relies on that exactness to stay first-order consistent
//! at every nesting depth.

use serde::{Deserialize, Serialize};

use crate::error::{CmError, Result};
use crate::flows::{fd_jacobian, generator_flow_real, GeneratorId};
use crate::phase::HatPoint;

/// One program step: generator and real flow time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowStep(pub GeneratorId, pub f64);

/// Optional bookkeeping attached to an emitted program.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProgramMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub achieved_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slices: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

/// A finite composition of complete generator flows.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FlowProgram {
    pub steps: Vec<FlowStep>,
    #[serde(default)]
    pub meta: ProgramMeta,
}

impl FlowProgram {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_steps(steps: Vec<FlowStep>) -> Self {
        Self {
            steps,
            meta: ProgramMeta::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Reversed step order with negated times: the exact inverse map.
    pub fn inverse(&self) -> Self {
        Self::from_steps(
            self.steps
                .iter()
                .rev()
                .map(|&FlowStep(g, t)| FlowStep(g, -t))
                .collect(),
        )
    }

    pub fn concat(mut self, other: &FlowProgram) -> Self {
        self.steps.extend_from_slice(&other.steps);
        self
    }

    /// Sum of absolute step times.
    pub fn total_time(&self) -> f64 {
        self.steps.iter().map(|s| s.1.abs()).sum()
    }

    /// Infallible closure view for defect measurements; panics on non-finite
    /// intermediate states.
    pub fn map(&self) -> impl Fn(&HatPoint) -> HatPoint + '_ {
        move |p| run_program(self, p).expect("program blew up")
    }
}

/// Applies the program left to right.
pub fn run_program(prog: &FlowProgram, p: &HatPoint) -> Result<HatPoint> {
    let mut cur = p.clone();
    for (idx, &FlowStep(gen, t)) in prog.steps.iter().enumerate() {
        cur = generator_flow_real(gen, t, &cur);
        if !cur.is_finite() {
            return Err(CmError::BlowUp { step: idx });
        }
    }
    Ok(cur)
}

/// `[(a, t), (b, t)]`: the composition algorithm consistent with the sum of
/// the two generator fields.
pub fn sum_algorithm(a: GeneratorId, b: GeneratorId, t: f64) -> FlowProgram {
    FlowProgram::from_steps(vec![FlowStep(a, t), FlowStep(b, t)])
}

/// The four-step commutator program with times `(sqrt t, sqrt t, -sqrt t,
/// -sqrt t)`, consistent with the field of the Poisson bracket of the two
/// generator Hamiltonians; requires `t > 0`.
pub fn bracket_algorithm(a: GeneratorId, b: GeneratorId, t: f64) -> Result<FlowProgram> {
    if t <= 0.0 {
        return Err(CmError::NonPositiveTime { t });
    }
    let s = t.sqrt();
    Ok(FlowProgram::from_steps(vec![
        FlowStep(a, s),
        FlowStep(b, s),
        FlowStep(a, -s),
        FlowStep(b, -s),
    ]))
}

/// Concatenates `m` copies of the time-`t/m` program.
pub fn iterate_algorithm(prog_for_time: impl Fn(f64) -> FlowProgram, t: f64, m: usize) -> FlowProgram {
    let m = m.max(1);
    let piece = prog_for_time(t / m as f64);
    let mut steps = Vec::with_capacity(piece.steps.len() * m);
    for _ in 0..m {
        steps.extend_from_slice(&piece.steps);
    }
    FlowProgram::from_steps(steps)
}

/// Expression tree over the generator set: real scaling, sums and Lie
/// brackets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "lowercase")]
pub enum RecipeNode {
    Gen { id: GeneratorId },
    Scale { factor: f64, child: Box<RecipeNode> },
    Add { children: Vec<RecipeNode> },
    Bracket { left: Box<RecipeNode>, right: Box<RecipeNode> },
}

impl RecipeNode {
    pub fn gen(id: GeneratorId) -> Self {
        RecipeNode::Gen { id }
    }

    pub fn scale(factor: f64, child: RecipeNode) -> Self {
        RecipeNode::Scale {
            factor,
            child: Box::new(child),
        }
    }

    pub fn bracket(left: RecipeNode, right: RecipeNode) -> Self {
        RecipeNode::Bracket {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Bracket nesting depth: generators are 0, a bracket adds one level.
    pub fn depth(&self) -> usize {
        match self {
            RecipeNode::Gen { .. } => 0,
            RecipeNode::Scale { child, .. } => child.depth(),
            RecipeNode::Add { children } => children.iter().map(RecipeNode::depth).max().unwrap_or(0),
            RecipeNode::Bracket { left, right } => 1 + left.depth().max(right.depth()),
        }
    }

    /// The Hamiltonian the node stands for, as a trace polynomial.
    pub fn hamiltonian(&self) -> crate::poly::TracePolynomial {
        match self {
            RecipeNode::Gen { id } => id.hamiltonian(),
            RecipeNode::Scale { factor, child } => {
                child.hamiltonian().scale(crate::matrix::C64::new(*factor, 0.0))
            }
            RecipeNode::Add { children } => children
                .iter()
                .fold(crate::poly::TracePolynomial::zero(), |acc, c| {
                    acc.add(&c.hamiltonian())
                }),
            RecipeNode::Bracket { left, right } => {
                left.hamiltonian().poisson_bracket(&right.hamiltonian())
            }
        }
    }
}

/// A resolved closure target: the expression realizing it and the span
/// residual it was accepted at.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClosureRecipe {
    /// Text form of the target Hamiltonian.
    pub target: String,
    pub expression: RecipeNode,
    pub residual: f64,
    /// Bracket depth at which the target resolved.
    pub depth: usize,
}

/// Emits the time-`t` algorithm program of a recipe node.
///
/// Scaling folds into the flow time, sums concatenate, and a bracket at
/// positive time runs both children forward then both exact inverses; a
/// bracket at negative time swaps its operands.
pub fn realize_node(node: &RecipeNode, t: f64) -> FlowProgram {
    match node {
        RecipeNode::Gen { id } => {
            if t == 0.0 {
                FlowProgram::identity()
            } else {
                FlowProgram::from_steps(vec![FlowStep(*id, t)])
            }
        }
        RecipeNode::Scale { factor, child } => realize_node(child, factor * t),
        RecipeNode::Add { children } => children
            .iter()
            .fold(FlowProgram::identity(), |acc, c| acc.concat(&realize_node(c, t))),
        RecipeNode::Bracket { left, right } => {
            if t == 0.0 {
                return FlowProgram::identity();
            }
            let (a, b, s) = if t > 0.0 {
                (left, right, t.sqrt())
            } else {
                (right, left, (-t).sqrt())
            };
            let fa = realize_node(a, s);
            let fb = realize_node(b, s);
            let inv_a = fa.inverse();
            let inv_b = fb.inverse();
            fa.concat(&fb).concat(&inv_a).concat(&inv_b)
        }
    }
}

/// Sampled C^k seminorm between two point maps, k in {0, 1}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeminormReport {
    pub k: u8,
    pub per_sample: Vec<f64>,
    pub sup: f64,
}

/// k = 0: Frobenius distance of outputs per sample. k = 1: adds the largest
/// entry of the finite-difference Jacobian difference (step `h`) in entry
/// coordinates.
pub fn ck_seminorm(
    map1: &(dyn Fn(&HatPoint) -> HatPoint + Sync),
    map2: &(dyn Fn(&HatPoint) -> HatPoint + Sync),
    samples: &[HatPoint],
    k: u8,
    h: f64,
) -> SeminormReport {
    assert!(k <= 1, "only C^0 and C^1 seminorms are supported");
    let per_sample: Vec<f64> = crate::batch::map(samples, |p| {
        let mut value = map1(p).distance(&map2(p));
        if k == 1 {
            let j1 = fd_jacobian(map1, p, h);
            let j2 = fd_jacobian(map2, p, h);
            value += j1.sub(&j2).max_abs();
        }
        value
    });
    let sup = per_sample.iter().copied().fold(0.0, f64::max);
    SeminormReport { k, per_sample, sup }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::{hamiltonian_field, poisson_bracket, reference_flow, symplectic_defect, tau_compat_defect};
    use crate::matrix::{C64, ComplexMatrix};
    use crate::sampling::Sampler;
    use crate::space::chart_to_point;
    use crate::tol::Tolerances;

    fn chart_hat(seed: u64, n: usize) -> HatPoint {
        let mut s = Sampler::new(seed);
        let tol = Tolerances::default();
        let chart = s.chart(n, (-2.0, 2.0), 0.4, (-1.5, 1.5));
        chart_to_point(&chart, &tol).unwrap().hat()
    }

    #[test]
    fn identity_and_inverse_flows() {
        let p = chart_hat(1, 2);
        let empty = FlowProgram::identity();
        assert_eq!(run_program(&empty, &p).unwrap(), p);

        let forward_back = FlowProgram::from_steps(vec![
            FlowStep(GeneratorId::TrY, 1.0),
            FlowStep(GeneratorId::TrY, -1.0),
        ]);
        let q = run_program(&forward_back, &p).unwrap();
        assert!(q.distance(&p) < 1e-15);
    }

    #[test]
    fn splitting_a_program_changes_its_output() {
        // fixture: one sum step vs the same total time in two slices
        let p = chart_hat(3, 2);
        let whole = sum_algorithm(GeneratorId::TrY2, GeneratorId::TrX3, 1.0);
        let halved = iterate_algorithm(
            |t| sum_algorithm(GeneratorId::TrY2, GeneratorId::TrX3, t),
            1.0,
            2,
        );
        let d = run_program(&whole, &p)
            .unwrap()
            .distance(&run_program(&halved, &p).unwrap());
        assert!(d > 1e-3, "non-commuting flows must differ, got {d}");
    }

    #[test]
    fn reverse_negate_is_the_exact_inverse() {
        let mut s = Sampler::new(5);
        let p = chart_hat(7, 2);
        let steps: Vec<FlowStep> = (0..12)
            .map(|_| {
                let g = GeneratorId::ALL[(s.uniform(0.0, 4.0) as usize).min(3)];
                FlowStep(g, s.uniform(-0.3, 0.3))
            })
            .collect();
        let prog = FlowProgram::from_steps(steps);
        let round = prog.clone().concat(&prog.inverse());
        let q = run_program(&round, &p).unwrap();
        assert!(q.distance(&p) < 1e-10);
    }

    #[test]
    fn sum_algorithm_is_first_order() {
        // single-application error O(t^2): fitted exponent in [1.7, 2.3]
        let p = chart_hat(9, 2);
        let h = GeneratorId::TrY.hamiltonian().add(&GeneratorId::TrX3.hamiltonian());
        let mut logs: Vec<(f64, f64)> = Vec::new();
        for k in 3..=9 {
            let t = 2f64.powi(-k);
            let approx = run_program(&sum_algorithm(GeneratorId::TrY, GeneratorId::TrX3, t), &p).unwrap();
            let exact = reference_flow(&h, t, &p, 2000).unwrap();
            let e = approx.distance(&exact);
            if e > 1e-14 {
                logs.push((t.ln(), e.ln()));
            }
        }
        let slope = fit_slope(&logs);
        assert!((1.7..=2.3).contains(&slope), "slope {slope}");
    }

    pub(super) fn fit_slope(points: &[(f64, f64)]) -> f64 {
        let n = points.len() as f64;
        let sx: f64 = points.iter().map(|p| p.0).sum();
        let sy: f64 = points.iter().map(|p| p.1).sum();
        let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }

    #[test]
    fn iterated_sum_error_decays_like_one_over_m() {
        // (TrY, TrX3) has polynomial-in-t flows, so no finite-time escape
        let p = chart_hat(11, 2);
        let t = 1.0;
        let h = GeneratorId::TrY.hamiltonian().add(&GeneratorId::TrX3.hamiltonian());
        let exact = reference_flow(&h, t, &p, 20_000).unwrap();
        let mut logs: Vec<(f64, f64)> = Vec::new();
        for m in [4usize, 8, 16, 32, 64, 128, 256] {
            let prog = iterate_algorithm(
                |s| sum_algorithm(GeneratorId::TrY, GeneratorId::TrX3, s),
                t,
                m,
            );
            let e = run_program(&prog, &p).unwrap().distance(&exact);
            logs.push(((1.0 / m as f64).ln(), e.ln()));
        }
        let slope = fit_slope(&logs);
        assert!((0.8..=1.2).contains(&slope), "slope {slope}");
    }

    #[test]
    fn bracket_algorithm_requires_positive_time() {
        assert!(matches!(
            bracket_algorithm(GeneratorId::TrY, GeneratorId::TrX3, 0.0),
            Err(CmError::NonPositiveTime { .. })
        ));
        assert!(bracket_algorithm(GeneratorId::TrY, GeneratorId::TrX3, 1e-4).is_ok());
    }

    #[test]
    fn bracket_algorithm_matches_the_bracket_field() {
        // (TrY, TrX_sq): the commutator program is exact for every t, so the
        // difference quotient matches the bracket field to rounding
        let p = chart_hat(13, 2);
        let t = 1e-6;
        let prog = bracket_algorithm(GeneratorId::TrY, GeneratorId::TrXSq, t).unwrap();
        let q = run_program(&prog, &p).unwrap();
        let hb = GeneratorId::TrY
            .hamiltonian()
            .poisson_bracket(&GeneratorId::TrXSq.hamiltonian());
        let field = hamiltonian_field(&hb, &p);
        let quotient_x = q.x.sub(&p.x).scale(C64::new(1.0 / t, 0.0));
        let quotient_y = q.y.sub(&p.y).scale(C64::new(1.0 / t, 0.0));
        assert!(quotient_x.sub(&field.dx).norm() < 1e-4);
        assert!(quotient_y.sub(&field.dy).norm() < 1e-4);
    }

    #[test]
    fn bracket_of_generic_pair_converges_to_the_bracket_field() {
        // (TrY2, TrX3): consistency error is O(sqrt t); check the decay
        let p = chart_hat(15, 2);
        let hb = GeneratorId::TrY2
            .hamiltonian()
            .poisson_bracket(&GeneratorId::TrX3.hamiltonian());
        let field = hamiltonian_field(&hb, &p);
        let err_at = |t: f64| {
            let prog = bracket_algorithm(GeneratorId::TrY2, GeneratorId::TrX3, t).unwrap();
            let q = run_program(&prog, &p).unwrap();
            let qx = q.x.sub(&p.x).scale(C64::new(1.0 / t, 0.0));
            let qy = q.y.sub(&p.y).scale(C64::new(1.0 / t, 0.0));
            (qx.sub(&field.dx).norm_sq() + qy.sub(&field.dy).norm_sq()).sqrt()
        };
        let e1 = err_at(1e-4);
        let e2 = err_at(1e-6);
        // ratio should be about sqrt(1e-4/1e-6) = 10
        assert!(e2 < e1 / 5.0, "e(1e-4) = {e1}, e(1e-6) = {e2}");
    }

    #[test]
    fn commuting_pair_gives_the_identity_program() {
        // find a commuting pair by measuring the bracket first
        let p = chart_hat(17, 2);
        let a = GeneratorId::TrY;
        let b = GeneratorId::TrY2;
        let pb = poisson_bracket(&a.hamiltonian(), &b.hamiltonian(), &p);
        assert!(pb.norm() < 1e-14);
        let prog = bracket_algorithm(a, b, 0.1).unwrap();
        let q = run_program(&prog, &p).unwrap();
        assert!(q.distance(&p) < 1e-12);
    }

    #[test]
    fn bracket_displacement_scales_linearly() {
        let p = chart_hat(19, 2);
        let disp = |t: f64| {
            let prog = bracket_algorithm(GeneratorId::TrY2, GeneratorId::TrX3, t).unwrap();
            run_program(&prog, &p).unwrap().distance(&p)
        };
        let d2 = disp(1e-2);
        let d4 = disp(1e-4);
        let ratio = d2 / d4;
        assert!((50.0..200.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn programs_commute_with_tau_and_stay_symplectic() {
        let p = chart_hat(21, 2); // Hermitian sample
        let mut s = Sampler::new(23);
        let steps: Vec<FlowStep> = (0..10)
            .map(|_| {
                let g = GeneratorId::ALL[(s.uniform(0.0, 4.0) as usize).min(3)];
                FlowStep(g, s.uniform(-0.2, 0.2))
            })
            .collect();
        let prog = FlowProgram::from_steps(steps);
        let map = prog.map();
        assert!(tau_compat_defect(&map, &p) < 1e-10);
        assert!(symplectic_defect(&map, &p, 1e-5) < 1e-6);
        // Hermiticity preserved
        let q = run_program(&prog, &p).unwrap();
        assert!(q.hermitian_defect() < 1e-12);
    }

    #[test]
    fn realized_bracket_nodes_agree_with_their_hamiltonians() {
        // depth 2: [TrY2, [TrY, TrX3]] as a recipe node
        let p = chart_hat(25, 2);
        let inner = RecipeNode::bracket(RecipeNode::gen(GeneratorId::TrY), RecipeNode::gen(GeneratorId::TrX3));
        let node = RecipeNode::bracket(RecipeNode::gen(GeneratorId::TrY2), inner);
        assert_eq!(node.depth(), 2);
        let h = node.hamiltonian();
        let field = hamiltonian_field(&h, &p);
        let err_at = |t: f64| {
            let prog = realize_node(&node, t);
            let q = run_program(&prog, &p).unwrap();
            let qx = q.x.sub(&p.x).scale(C64::new(1.0 / t, 0.0));
            let qy = q.y.sub(&p.y).scale(C64::new(1.0 / t, 0.0));
            (qx.sub(&field.dx).norm_sq() + qy.sub(&field.dy).norm_sq()).sqrt()
        };
        // consistency: the normalized displacement approaches the field
        let e1 = err_at(1e-3);
        let e2 = err_at(1e-5);
        assert!(e2 < e1 / 2.0, "e(1e-3) = {e1}, e(1e-5) = {e2}");
        let rel = e2 / (1.0 + field.norm());
        assert!(rel < 0.05, "relative consistency error {rel}");
    }

    #[test]
    fn realized_negative_bracket_swaps_operands() {
        let p = chart_hat(27, 2);
        let node = RecipeNode::bracket(RecipeNode::gen(GeneratorId::TrY), RecipeNode::gen(GeneratorId::TrX3));
        let t = 1e-5;
        let fwd = run_program(&realize_node(&node, t), &p).unwrap();
        let swapped = RecipeNode::bracket(RecipeNode::gen(GeneratorId::TrX3), RecipeNode::gen(GeneratorId::TrY));
        let neg = run_program(&realize_node(&swapped, -t), &p).unwrap();
        assert!(fwd.distance(&neg) < 1e-12);
    }

    #[test]
    fn scale_folds_into_time() {
        let p = chart_hat(29, 2);
        let node = RecipeNode::scale(0.25, RecipeNode::gen(GeneratorId::TrY2));
        let a = run_program(&realize_node(&node, 0.8), &p).unwrap();
        let b = generator_flow_real(GeneratorId::TrY2, 0.2, &p);
        assert!(a.distance(&b) < 1e-15);
    }

    #[test]
    fn seminorm_reports() {
        let p1 = chart_hat(31, 2);
        let p2 = chart_hat(33, 2);
        let samples = vec![p1, p2];
        let id = |q: &HatPoint| q.clone();
        let r = ck_seminorm(&id, &id, &samples, 1, 1e-5);
        assert!(r.sup == 0.0);

        // constant shift in X: C^0 picks up the shift, the Jacobian term is 0
        let shift = |q: &HatPoint| HatPoint {
            n: q.n,
            x: q.x.add(&ComplexMatrix::scaled_identity(q.n, C64::new(0.5, 0.0))),
            y: q.y.clone(),
            variant: q.variant,
        };
        let r0 = ck_seminorm(&id, &shift, &samples, 0, 1e-5);
        let expected = 0.5 * (2f64).sqrt();
        assert!((r0.sup - expected).abs() < 1e-12);
        let r1 = ck_seminorm(&id, &shift, &samples, 1, 1e-5);
        assert!((r1.sup - expected).abs() < 1e-9);

        // linear shear: k=1 sees the epsilon in the Jacobian block
        let eps = 1e-3;
        let shear = move |q: &HatPoint| HatPoint {
            n: q.n,
            x: q.x.add(&q.y.scale(C64::new(eps, 0.0))),
            y: q.y.clone(),
            variant: q.variant,
        };
        let r0 = ck_seminorm(&id, &shear, &samples, 0, 1e-5);
        let r1 = ck_seminorm(&id, &shear, &samples, 1, 1e-5);
        let jac_part = r1.sup - r0.sup;
        assert!((jac_part - eps).abs() < 1e-7, "jacobian part {jac_part}");
    }

    #[test]
    fn program_json_shape() {
        let mut prog = sum_algorithm(GeneratorId::TrY2, GeneratorId::TrXSq, 0.125);
        prog.meta.slices = Some(4);
        let json = serde_json::to_value(&prog).unwrap();
        assert_eq!(json["steps"][0][0], "TrY2");
        assert_eq!(json["steps"][1][0], "TrX_sq");
        assert_eq!(json["steps"][0][1], 0.125);
        let back: FlowProgram = serde_json::from_value(json).unwrap();
        assert_eq!(back, prog);
    }
}
