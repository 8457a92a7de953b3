//! Error types shared across the engine.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("invalid permutation image vector {images:?}")]
    InvalidPermutation { images: Vec<u16> },
    #[error("bad group spec `{spec}`: {reason}")]
    BadGroupSpec { spec: String, reason: String },
    #[error("group too large: order exceeds bound {bound} ({context})")]
    GroupTooLarge { bound: usize, context: String },
    #[error("subset is not closed under the group operation")]
    NotASubgroup,
    #[error("element set is not a subset of the group")]
    NotASubset,
}

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error)]
pub enum SystemError {
    #[error("unknown coefficient system kind `{0}`")]
    UnknownKind(String),
    #[error("system `{system}` does not apply to group {group}: {reason}")]
    GroupMismatch {
        system: String,
        group: String,
        reason: String,
    },
    #[error("missing restriction/induction table for class pair ({low} <= {high})")]
    MissingTable { low: String, high: String },
    #[error("no dimension-1 trivial object at subgroup class {class}")]
    MissingUnit { class: String },
    #[error("system is not semisimple, as required by this operation")]
    NotSemisimple,
    #[error("class pair ({low} <= {high}): embedding not reachable from the stored table")]
    UnreachableEmbedding { low: String, high: String },
    #[error("structural error at {location}: {reason}")]
    Structural { location: String, reason: String },
    #[error("file error at {path}: {reason}")]
    File { path: String, reason: String },
    #[error("character data for `{label}` does not decompose integrally at {class}")]
    BadCharacter { label: String, class: String },
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Error)]
pub enum FiltrationError {
    #[error("stage too large: {symbols} generator symbols exceed bound {bound}")]
    StageTooLarge { symbols: usize, bound: usize },
    #[error("mismatched stages: {0}")]
    MismatchedStages(String),
    #[error("no stabilization at or below n = {bound}")]
    NoStabilization { bound: usize },
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Error)]
pub enum PosetError {
    #[error("size bound exceeded: {context}")]
    SizeBound { context: String },
    #[error("q = {q} is not prime; only prime fields are supported")]
    NotPrime { q: u32 },
    #[error("refinement test requires odd q (got q = {q}); pass force to run anyway")]
    EvenCharacteristic { q: u32 },
    #[error("generator images do not define a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}
