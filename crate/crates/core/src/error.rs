use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: expected {expected} entries, found {found}")]
    RaggedRows {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: invalid character {ch:?}")]
    InvalidChar { line: usize, ch: char },
    #[error("matrix is not square: {rows} rows of length {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is empty")]
    Empty,
    #[error("size {n} exceeds the limit of {limit}")]
    SizeLimit { n: usize, limit: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("not a permutation: {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("invalid transfer move: {0}")]
    InvalidMove(String),
    #[error("invalid vertex split: {0}")]
    InvalidSplit(String),
    #[error("vertex {vertex} has out-degree {degree}, need at least 2")]
    OutDegree { vertex: usize, degree: usize },
    #[error("vertex {vertex} is not cofinal")]
    NotCofinal { vertex: usize },
    #[error("{which} has a sink at vertex {vertex}")]
    SinkPresent { which: &'static str, vertex: usize },
    #[error("matrix entry is not 0 or 1")]
    NotZeroOne,
    #[error("integer overflow")]
    Overflow,
}
