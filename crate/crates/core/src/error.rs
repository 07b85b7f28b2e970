use thiserror::Error;

/// Failures that prevent a structure from being checked at all.
///
/// These are distinct from law violations: a structurally broken input has
/// no meaningful [`ValidationReport`](crate::ValidationReport).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("identifier `{id}` referenced by {context} is not declared")]
    Undeclared { id: String, context: String },
    #[error("{map} is missing an entry for `{key}`")]
    MissingEntry { map: String, key: String },
    #[error("{map} has an unexpected entry for `{key}`")]
    ExtraEntry { map: String, key: String },
    #[error("boundary mismatch: {0}")]
    Boundary(String),
    #[error("{0}")]
    Malformed(String),
}

/// Errors returned by the constructions and combinators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Structure(#[from] StructureError),
    /// The input was well formed but violates the laws the operation requires.
    #[error("invalid {what}: {report}")]
    Invalid { what: &'static str, report: crate::ValidationReport },
    #[error("search budget of {limit} candidates exceeded")]
    GuardExceeded { limit: u64 },
    /// Two computations that must agree did not. Always a bug in this crate.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
