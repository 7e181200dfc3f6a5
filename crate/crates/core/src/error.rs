use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GybeError {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("singular parameter: {0}")]
    SingularParameter(String),
    #[error("singular argument: {0}")]
    SingularArgument(String),
    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),
    #[error("incomplete block map: missing cell ({0}, {1})")]
    IncompleteBlockMap(u32, u32),
    #[error("invalid rate pattern: {0}")]
    InvalidPattern(String),
    #[error("label {0} out of range for dimension {1}")]
    LabelOutOfRange(i32, usize),
    #[error("unknown family '{name}'; known families: {known}")]
    UnknownFamily { name: String, known: String },
    #[error("unknown target shape '{0}'")]
    UnknownShape(String),
    #[error("memory guard exceeded: dimension {dim} > {limit}")]
    MemoryGuard { dim: usize, limit: usize },
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, GybeError>;
