use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("slot {slot} out of range for rank {rank}")]
    SlotOutOfRange { slot: usize, rank: usize },
    #[error("slot ({factor}, {slot}) used more than once")]
    SlotReuse { factor: usize, slot: usize },
    #[error("repeated slot {0}")]
    RepeatedSlot(usize),
    #[error("slots to (anti)symmetrize must share variance")]
    MixedVariance,
    #[error("metric is singular")]
    SingularMetric,
    #[error("component count {got} does not match dim^rank = {want}")]
    ShapeMismatch { got: usize, want: usize },
    #[error("non-finite component produced")]
    NonFinite,
    #[error("jet order {have} is insufficient, need {need}")]
    InsufficientJetOrder { have: usize, need: usize },
    #[error("operation needs dimension at least {need}, got {got}")]
    DimensionTooSmall { need: usize, got: usize },
    #[error("order {ell} out of range for dimension {dim}")]
    OrderOutOfRange { ell: usize, dim: usize },
    #[error("dimension {0} is odd")]
    OddDimension(usize),
    #[error("model `{0}` is not Einstein")]
    NotEinstein(String),
    #[error("model `{0}` is not compact")]
    NonCompact(String),
    #[error("Euler characteristic of `{0}` is unknown")]
    UnknownEulerCharacteristic(String),
    #[error("weight {w} is excluded for rank {rank} (division by zero)")]
    ExcludedWeight { w: i32, rank: usize },
    #[error("point outside the chart domain: {0}")]
    OutOfDomain(String),
    #[error("metric is not in geodesic normal form: {0}")]
    NonNormalForm(String),
    #[error("unexpected logarithmic term with coefficient {0:e}")]
    UnexpectedLogTerm(f64),
    #[error("tensor too large to materialize: {0} entries")]
    TooLarge(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
