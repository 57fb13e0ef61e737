use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("metis line {line}: {msg}")]
    Metis { line: usize, msg: String },
    #[error("graph construction: {0}")]
    Graph(String),
    #[error("block {0} does not occur in the assignment")]
    MissingBlock(usize),
    #[error("invalid hierarchy: {0}")]
    Hierarchy(String),
    #[error("PE id {pe} out of range (k = {k})")]
    PeOutOfRange { pe: usize, k: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("invalid rational `{0}`")]
    Rational(String),
    #[error("more blocks than vertices ({blocks} > {vertices})")]
    TooManyBlocks { blocks: usize, vertices: usize },
    #[error("graph has zero total vertex weight")]
    ZeroWeight,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("quality table: {0}")]
    QualityTable(String),
    #[error("oracle: {0}")]
    Oracle(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
