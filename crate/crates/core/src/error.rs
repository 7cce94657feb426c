use thiserror::Error;

use crate::construction::StepRecord;
use crate::lattice::FinSet;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{x} is not a proper subset of {y}")]
    NotProperSubset { x: FinSet, y: FinSet },

    #[error("pair ({x}, {y}) lies outside the table window of width {width}")]
    OutOfDomain { x: FinSet, y: FinSet, width: u32 },

    #[error("unknown rule {0:?}")]
    UnknownRule(String),

    #[error("{what}: {needed} exceeds the cap of {cap}")]
    CapExceeded { what: String, needed: u128, cap: u128 },

    /// Two members of `H` above `x` give `x` different colors.
    #[error("witness disagreement at {x}: ({x}, {y1}) has color {c1}, ({x}, {y2}) has color {c2}")]
    WitnessDisagreement {
        x: FinSet,
        y1: FinSet,
        c1: u8,
        y2: FinSet,
        c2: u8,
    },

    #[error("verification failure: {0}")]
    VerificationFailure(String),

    #[error("construction stuck at step {step} of the {stage} stage")]
    ConstructionStuck {
        stage: String,
        step: usize,
        log: Vec<StepRecord>,
    },

    #[error("window exhausted: {0}")]
    WindowExhausted(String),

    #[error("conflicting constraints on ({x}, {y}): colors {c1} and {c2}")]
    ConstraintConflict { x: FinSet, y: FinSet, c1: u8, c2: u8 },

    #[error("size limit: {what} has {size} elements, limit is {limit}")]
    SizeLimit { what: String, size: usize, limit: usize },
}

impl Error {
    /// Stable snake-case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::Precondition(_) => "precondition",
            Error::NotProperSubset { .. } => "not_proper_subset",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::UnknownRule(_) => "unknown_rule",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::WitnessDisagreement { .. } => "witness_disagreement",
            Error::VerificationFailure(_) => "verification_failure",
            Error::ConstructionStuck { .. } => "construction_stuck",
            Error::WindowExhausted(_) => "window_exhausted",
            Error::ConstraintConflict { .. } => "constraint_conflict",
            Error::SizeLimit { .. } => "size_limit",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn cap(what: impl Into<String>, needed: u128, cap: u128) -> Self {
        Error::CapExceeded {
            what: what.into(),
            needed,
            cap,
        }
    }
}
