use thiserror::Error;

/// Errors raised by the engine's operations.
///
/// Invariant violations found while validating a model are data (see
/// [`crate::validation::Violation`]); the variants here are failures that stop an
/// operation.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty point set")]
    EmptyPointSet,

    #[error("unknown node `{node}` in piece `{piece}`")]
    UnknownNode { piece: String, node: String },

    #[error("unknown piece `{0}`")]
    UnknownPiece(String),

    #[error("unknown subsurface `{0}`")]
    UnknownSubsurface(String),

    #[error("piece `{0}` is not assigned to any subsurface")]
    UnassignedPiece(String),

    #[error("inadmissible word in piece `{piece}`: no edge {from} -> {to} (position {position})")]
    InadmissibleWord {
        piece: String,
        from: String,
        to: String,
        position: usize,
    },

    #[error("empty periodic word")]
    EmptyWord,

    #[error("heteroclinic relation is cyclic: {}", .0.join(" -> "))]
    CyclicRelation(Vec<String>),

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("missing orientation mark on {from} -> {to}: {detail}")]
    MissingMark { from: String, to: String, detail: String },

    #[error("resource cap exceeded: {what} (cap {cap})")]
    ResourceCap { what: String, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::ResourceCap { .. })
    }
}
