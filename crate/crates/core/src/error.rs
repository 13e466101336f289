use thiserror::Error;

use crate::lattice::SubsetId;

/// Errors raised by the verification library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ground set size {0} outside 1..=12")]
    GroundSize(usize),
    #[error("subset {subset} outside the ground set [{m}]")]
    SubsetOutOfRange { subset: u32, m: usize },
    #[error("negative coefficient {0} in monotone combination")]
    NegativeCoefficient(String),
    #[error("negative weight {value} at subset {subset}")]
    NegativeWeight { subset: u32, value: String },
    #[error("weight at subset {0} is zero; the local FKG check needs strictly positive weights")]
    ZeroWeight(u32),
    #[error("degenerate weight table")]
    DegenerateWeights,
    #[error("weights sum to {sum}, deficit {deficit}")]
    WeightSum { sum: String, deficit: String },
    #[error("table has {got} entries, expected {expected}")]
    TableSize { got: usize, expected: usize },
    #[error("conditioning on null event (generator {0})")]
    NullEvent(SubsetId),
    #[error("bias {value} at coordinate {index} outside [0,1]")]
    BiasRange { index: usize, value: String },
    #[error("invalid log-supermodular parameters: {0}")]
    Couplings(String),
    #[error("number of functions {0} outside 1..=8")]
    ArityRange(usize),
    #[error("empty product")]
    EmptyProduct,
    #[error("index {index} outside [{n}]")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("k = {k} outside 0..={max}")]
    KRange { k: usize, max: usize },
    #[error("{parts:?} is not a partition of {n}")]
    NotAPartition { parts: Vec<usize>, n: usize },
    #[error("invalid set partition: {0}")]
    InvalidSetPartition(String),
    #[error("degree bounds differ: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("degree {0} outside 1..=10")]
    DegreeRange(usize),
    #[error("power index {0} must be at least 1")]
    PowerIndex(usize),
    #[error("series has constant term {0}, expected {1}")]
    ConstantTerm(String, &'static str),
    #[error("invalid rational {0:?}")]
    ParseRational(String),
    #[error("series coefficient at degree {0} is outside the nonnegative cone")]
    OutsideCone(usize),
    #[error("measure fails the FKG condition at ({a}, {b})")]
    NotFkg { a: SubsetId, b: SubsetId },
    #[error("{check} violated: {detail}")]
    Violation { check: &'static str, detail: String },
    #[error("{field}: {inner}")]
    InField { field: String, inner: Box<Error> },
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn in_field(self, field: impl Into<String>) -> Self {
        Error::InField {
            field: field.into(),
            inner: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
