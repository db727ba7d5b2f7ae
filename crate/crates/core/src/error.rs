use thiserror::Error;

/// Input-validation and domain errors. Everything here maps to "the caller
/// handed us something malformed", as opposed to negative mathematical
/// results (no perfect matching, Hall violation, ...) which are ordinary
/// return values, not errors.
#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("vertex index {index} out of bounds for {side} side of size {size}")]
    IndexOutOfBounds {
        side: &'static str,
        index: usize,
        size: usize,
    },

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("edge weight must be finite and non-negative, got {0}")]
    BadWeight(f64),

    #[error("operation requires weights on every edge")]
    MissingWeights,

    #[error("group element does not belong to {expected}: {found}")]
    DescriptorMismatch { expected: String, found: String },

    #[error("cannot parse group element {text:?} for {descriptor}: {reason}")]
    BadElement {
        descriptor: String,
        text: String,
        reason: String,
    },

    #[error("free-group rank {0} unsupported (serialization alphabet allows 1..=25)")]
    BadRank(usize),

    #[error("cyclic modulus must be >= 1")]
    BadModulus,

    #[error("descriptor mismatch between {0} and {1}")]
    SubsetDescriptorMismatch(String, String),

    #[error("duplicate triple ({a}, {g}, {b})")]
    DuplicateTriple { a: usize, g: String, b: usize },

    #[error("matching is invalid: {0}")]
    InvalidMatching(String),

    #[error("chosen element {g} is not among the triples for orbit pair ({a}, {b})")]
    BadChoice { a: usize, g: String, b: usize },

    #[error("factor matching key ({0}, {1}) is not an edge of the factor graph")]
    NotAFactorEdge(usize, usize),

    #[error("window contains elements outside the group descriptor {0}")]
    BadWindow(String),

    #[error("latin square of order {got} does not match |F| = {expected}")]
    LatinOrderMismatch { got: usize, expected: usize },

    #[error("{0}")]
    BadRotation(String),

    #[error("radius {r} exceeds the single-period cap {cap}")]
    RadiusAboveCap { r: f64, cap: f64 },

    #[error("invalid input: {0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
