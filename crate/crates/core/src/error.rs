use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at row {row}, column {col}: invalid field {field:?}")]
    Parse { row: usize, col: usize, field: String },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("column {index} has zero norm")]
    DegenerateColumn { index: usize },

    #[error("matrix columns are not normalized; call normalize_columns first")]
    NotNormalized,

    #[error("selected columns are rank deficient (support {support:?})")]
    DegenerateSupport { support: Vec<usize> },

    #[error("domain error: {0}")]
    Domain(String),
}
