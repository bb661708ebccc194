//! Default numeric tolerances, overridable per run.
//!
//! Tolerance tiers: `algebraic` guards identities that hold to rounding,
//! `equivariance` guards identities routed through an inverse or a
//! decomposition, `membership` guards set-membership style checks.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    /// Identities exact up to rounding (involutions, constructed moment values).
    pub algebraic: f64,
    /// Identities that pass through an inverse or an eigendecomposition.
    pub equivariance: f64,
    /// Membership checks: rank-one defect, real-form detection, level sets.
    pub membership: f64,
    /// Minimum eigenvalue / chart-coordinate separation before a collision error.
    pub separation: f64,
    /// Relative determinant floor for group elements: `floor * ||g||^n`.
    pub det_floor: f64,
    /// Target for the metric moment map after orbit normalization.
    pub normalize_target: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebraic: 1e-12,
            equivariance: 1e-10,
            membership: 1e-8,
            separation: 1e-8,
            det_floor: 1e-12,
            normalize_target: 1e-8,
        }
    }
}

impl Tolerances {
    /// Applies a `KEY=VALUE` override; unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), String> {
        match key {
            "algebraic" => self.algebraic = value,
            "equivariance" => self.equivariance = value,
            "membership" => self.membership = value,
            "separation" => self.separation = value,
            "det_floor" => self.det_floor = value,
            "normalize_target" => self.normalize_target = value,
            _ => return Err(format!("unknown tolerance key: {key}")),
        }
        Ok(())
    }
}
