//! Jet-exact tensor calculus for curvature invariants, ambient metrics and
//! renormalized curvature integrals.

pub mod ambient;
pub mod error;
pub mod geometry;
pub mod integrate;
pub mod invariants;
pub mod jet;
pub mod report;
pub mod tensor;

pub use error::{Error, Result};
pub use jet::{Jet, JetSpace};
pub use report::{CheckReport, Criterion};
pub use tensor::{contract, ContractionSpec, DenseTensor, Scalar, Schedule, SlotRef, Variance};
