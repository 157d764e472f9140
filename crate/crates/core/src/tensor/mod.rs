//! Dense tensors, contraction, symmetrization and generalized Kronecker deltas.

mod contract;
mod dense;
mod kronecker;
mod scalar;

pub use contract::{contract, ContractionSpec, Schedule, SlotRef};
pub use dense::{permutation_sign, raise_lower, DenseTensor, Variance};
pub use kronecker::{generalized_kronecker, KroneckerDelta, PairMatrix, MATERIALIZE_LIMIT};
pub use scalar::Scalar;
