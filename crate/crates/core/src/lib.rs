//! Calogero-Moser phase space at desk scale: dense complex matrix models,
//! trace-coordinate geometry, complete generator flows, splitting programs,
//! and compact-region approximation pipelines.

pub mod batch;
pub mod splitting;
pub mod eigen;
pub mod error;
pub mod flows;
pub mod matrix;
pub mod parse;
pub mod phase;
pub mod poly;
pub mod sampling;
pub mod space;
pub mod tol;

pub use error::{CmError, Result};
pub use matrix::{C64, ComplexMatrix};
pub use tol::Tolerances;
