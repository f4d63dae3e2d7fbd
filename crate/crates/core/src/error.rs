use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex count must be at least {min}, got {n}")]
    TooFewVertices { n: usize, min: usize },

    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("empty hyperedge")]
    EmptyEdge,

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("{what} limit exceeded: n = {n} > cap {cap}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("state is not invariant under qubit permutations")]
    NotPermutationInvariant,

    #[error("hypergraph is not connected")]
    Disconnected,

    #[error("no hyperedge crosses the bipartition")]
    NoCrossingEdge,

    #[error("n = {n} is outside the validity range of {family}")]
    OutOfRange { family: &'static str, n: usize },

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("rewrite rule disagrees with sign-state oracle: {0}")]
    OracleMismatch(String),

    #[error("reduction exceeded its step budget of {0}")]
    StepBudget(usize),

    #[error("parse error: {0}")]
    Parse(String),
}
