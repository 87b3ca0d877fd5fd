use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Structurally invalid input: bad order, coefficient index, grid, tolerance.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Config document rejected while reading; `at` is a line/column or a field path.
    #[error("parse error at {at}: {msg}")]
    Parse { at: String, msg: String },

    /// Requested order or index window exceeds the double-precision budget.
    #[error("precision budget exceeded: {0}")]
    Precision(String),

    /// A result from a theorem was requested outside its hypothesis.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("eigensolver failed for {dim}x{dim} Bloch matrix (t = {t}, eps = {eps}): {msg}")]
    Numeric {
        t: f64,
        eps: f64,
        dim: usize,
        msg: String,
    },

    #[error("io error on {path}: {source}")]
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
}
