use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("color {color} outside palette 1..={k}")]
    ColorOutOfRange { color: u32, k: u32 },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("vertex {u} is not a neighbor of {v}")]
    NotANeighbor { v: usize, u: usize },

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("denominator zero: {0}")]
    ZeroDenominator(String),

    #[error("no proper coloring exists")]
    NoProperColoring,

    #[error("greedy initialization failed at vertex {0}")]
    GreedyFailed(usize),

    #[error("no samples")]
    NoSamples,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("json: {0}")]
    Json(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
