use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("coordinate index {0} given more than once")]
    DuplicateIndex(usize),

    #[error("operation not supported for {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("unknown node {0}")]
    UnknownNode(usize),

    #[error("graph contains a cycle through node {0}")]
    Cycle(usize),

    #[error("node {0} is not a leaf")]
    NotLeaf(usize),

    #[error("node set is not ancestral: {0} is missing")]
    NotAncestral(usize),

    #[error("conditional map for node {0} is not always definite over its parents' reachable set")]
    NotAlwaysDefinite(usize),

    #[error("evidence point lies outside the conditioning marginal")]
    SampleOutsideMarginal,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
