//! Library error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CmError>;

#[derive(Debug, Error)]
pub enum CmError {
    #[error("shape mismatch: expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("group element is numerically singular: |det| = {det_abs:.3e} below floor {floor:.3e}")]
    SingularGroupElement { det_abs: f64, floor: f64 },

    #[error("input is not Hermitian: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("point is off the rank-one variety: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    OffVariety { defect: f64, tol: f64 },

    #[error("chart coordinates collide: gap {gap:.3e} below separation floor {floor:.3e}")]
    ChartCollision { gap: f64, floor: f64 },

    #[error("point is not on the real Calogero-Moser form: {reason}")]
    NotOnRealForm { reason: String },

    #[error("moment map is off the level set: distance {distance:.3e} exceeds tolerance {tol:.3e}")]
    OffLevelSet { distance: f64, tol: f64 },

    #[error("norm minimization did not converge in {iterations} iterations; best defect {best_defect:.3e}")]
    NonConvergence { iterations: usize, best_defect: f64 },

    #[error("state became non-finite at integration step {step}")]
    BlowUp { step: usize },

    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("flow time must be positive for the commutator algorithm, got {t}")]
    NonPositiveTime { t: f64 },

    #[error("Hamiltonian is not compatible with the real form: largest imaginary coefficient {max_imag:.3e}")]
    NotTauCompatible { max_imag: f64 },

    #[error("approximation missed the target: achieved {achieved:.3e} > requested {requested:.3e}")]
    TargetMiss { achieved: f64, requested: f64 },

    #[error("stage {index} violates its smallness precondition: deviation {deviation:.3e} > {bound:.3e}")]
    StageRejected {
        index: usize,
        deviation: f64,
        bound: f64,
    },

    #[error("stage radii are inconsistent at stage {index}: {reason}")]
    BadStageSpec { index: usize, reason: String },

    #[error("invalid input: {0}")]
    Invalid(String),
}
