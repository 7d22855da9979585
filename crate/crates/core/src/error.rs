use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("vocabulary is empty after filtering")]
    EmptyVocabulary,
    #[error("degenerate split: {0}")]
    DegenerateSplit(String),
    #[error("invalid embedding dimension {0}")]
    InvalidDim(usize),
    #[error("format error: {0}")]
    Format(String),
    #[error("no embedding for document `{0}`")]
    MissingEmbedding(String),
    #[error("invalid window size {0}")]
    InvalidWindow(usize),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("node {0} has zero degree")]
    ZeroDegree(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("evaluation mask is empty")]
    EmptyMask,
    #[error("adjacency must be normalized before propagation")]
    NotNormalized,
    #[error("non-finite gradient in {0}")]
    NonFiniteGradient(&'static str),
    #[error("unsupported format version: {0}")]
    Version(String),
    #[error("evaluation subset is empty")]
    EmptyEval,
    #[error("ROC-AUC undefined: subset contains a single class")]
    UndefinedAuc,
    #[error("training diverged ({0}); try a smaller learning rate")]
    Diverged(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit code for this error: 1 usage, 2 data/format, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidDim(_) | Error::InvalidWindow(_) => 1,
            Error::NonFiniteGradient(_) | Error::Diverged(_) | Error::ZeroDegree(_) => 3,
            _ => 2,
        }
    }
}
