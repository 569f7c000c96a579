use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the crate: I/O and parsing on the way
/// in, schema/config validation, and structural problems in model documents.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },

    #[error("{path} is empty")]
    EmptyFile { path: String },

    #[error("data row {row}: expected {expected} fields, found {found}")]
    RowArity {
        row: u64,
        expected: usize,
        found: usize,
    },

    #[error("data row {row}: {message}")]
    RowValue { row: u64, message: String },

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("class distribution is empty")]
    EmptyDistribution,

    #[error("no predictions to score")]
    EmptyPredictions,

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid synthetic spec: {0}")]
    Spec(String),

    #[error("model document parse error: {0}")]
    ModelParse(#[from] toml::de::Error),

    #[error("unsupported model document version {found} (this build reads version {supported})")]
    ModelVersion { found: i64, supported: i64 },

    #[error("malformed model document: {0}")]
    ModelStructure(String),

    #[error("instance has {found} values but the schema defines {expected} context attributes")]
    InstanceArity { expected: usize, found: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
