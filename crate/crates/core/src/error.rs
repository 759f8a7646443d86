use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("row {row}: column index {col} out of range (n_columns = {n_columns})")]
    ColumnOutOfRange { row: usize, col: usize, n_columns: usize },

    #[error("row {row}: duplicate column index {col}")]
    DuplicateColumn { row: usize, col: usize },

    #[error("row {row}: no nonzero entry in feature type `{block}`")]
    MissingBlock { row: usize, block: String },

    #[error("invalid feature-type layout: {0}")]
    Layout(String),

    #[error("dataset needs at least 2 rows and 2 distinct labels (rows = {rows}, labels = {labels})")]
    TooFewLabels { rows: usize, labels: usize },

    #[error("invalid label `{0}`: labels must be nonempty and contain no whitespace, ',' or '/'")]
    InvalidLabel(String),

    #[error("invalid feature subset: {0}")]
    Subset(String),

    #[error("invalid class partition: {0}")]
    Partition(String),

    #[error("{0} class is empty")]
    EmptyClass(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty point set")]
    EmptyPointSet,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("class `{class}` has {rows} rows; at least {needed} are required")]
    ClassTooSmall { class: String, rows: usize, needed: usize },

    #[error("both classes must be present in the training data")]
    SingleClass,

    #[error("iteratively reweighted least squares did not converge within {0} iterations")]
    NonConvergence(usize),

    #[error("key mismatch: {0}")]
    KeyMismatch(String),

    #[error("profile has not been standardized")]
    Unstandardized,

    #[error("input file not found: {}", .0.display())]
    MissingInput(PathBuf),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("singular value decomposition failed to converge")]
    Svd,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for bad input, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Svd => 1,
            _ => 2,
        }
    }
}
