use thiserror::Error;

use crate::kernel::Scalar;

/// Everything that can go wrong while building or evaluating channels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("space `{0}` has no elements")]
    EmptySpace(String),

    #[error("duplicate label `{label}` in space `{space}`")]
    DuplicateLabel { space: String, label: String },

    #[error("invalid label `{label}` in space `{space}`: labels must be non-empty and must not contain ','")]
    InvalidLabel { space: String, label: String },

    #[error("unknown label `{label}` in space `{space}`")]
    UnknownLabel { space: String, label: String },

    #[error("negative weight {weight} in {context}")]
    NegativeWeight { context: String, weight: Scalar },

    #[error("total mass {mass} exceeds 1 in {context}")]
    MassExceeded { context: String, mass: Scalar },

    #[error("{context} is not total: mass {mass} instead of 1")]
    NotTotal { context: String, mass: Scalar },

    #[error("cannot parse `{0}` as an exact rational")]
    ParseScalar(String),

    #[error("space mismatch in {context}: expected [{expected}], found [{found}]")]
    SpaceMismatch {
        context: String,
        expected: String,
        found: String,
    },

    #[error("arity mismatch: {0}")]
    Arity(String),

    #[error("malformed model: {0}")]
    Model(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("parent relation has a cycle through `{0}`")]
    Cycle(String),

    #[error("node `{0}` has a non-deterministic mechanism; twin networks need deterministic endogenous nodes")]
    NotDeterministic(String),

    #[error("invalid request: {0}")]
    Invalid(String),

    #[error("effect not identifiable: conditional row {row} is undefined but reached with positive weight")]
    Identifiability { row: String },

    #[error("dense joint needs {entries} entries, above the limit of {limit}")]
    JointTooLarge { entries: u128, limit: u128 },

    #[error("recursion depth {depth} exceeds the cap of {cap}")]
    DepthExceeded { depth: usize, cap: usize },
}

impl Error {
    /// Short machine-readable tag for JSON error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptySpace(_)
            | Error::DuplicateLabel { .. }
            | Error::InvalidLabel { .. }
            | Error::UnknownLabel { .. }
            | Error::NegativeWeight { .. }
            | Error::MassExceeded { .. }
            | Error::NotTotal { .. }
            | Error::ParseScalar(_)
            | Error::Model(_)
            | Error::Cycle(_) => "validation",
            Error::SpaceMismatch { .. } | Error::Arity(_) => "signature",
            Error::UnknownNode(_) | Error::Invalid(_) | Error::NotDeterministic(_) => "request",
            Error::Identifiability { .. } => "identifiability",
            Error::JointTooLarge { .. } | Error::DepthExceeded { .. } => "resource",
        }
    }

    /// Process exit code used by the command-line tool: 1 for invalid input, 2 for
    /// inference failures (identifiability, signature errors, resource limits).
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "validation" | "request" => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
