use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex count {0} outside 1..=64")]
    VertexCount(usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("adjacency is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("search budget of {limit} nodes exceeded")]
    BudgetExceeded { limit: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("cannot bisect dimension {dim}: interval [{lo}, {hi}] has no representable midpoint")]
    WidthUnderflow { dim: usize, lo: f64, hi: f64 },
    #[error("graph has no edges and is trivially embeddable")]
    NoEdges,
    #[error("exact re-check disagrees with interval refutation of constraint {constraint}")]
    ShadowMismatch { constraint: usize },
    #[error("invalid job spec: {0}")]
    InvalidSpec(String),
    #[error("unknown verification bundle {0:?}")]
    UnknownBundle(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
