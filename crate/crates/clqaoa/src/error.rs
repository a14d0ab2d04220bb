use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// A syntax or field error at a known position.
    #[error("{path}:{line}:{column}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        msg: String,
    },
    /// A structurally valid file whose content is wrong.
    #[error("{path}: field `{field}`: {msg}")]
    Field {
        path: PathBuf,
        field: String,
        msg: String,
    },
    #[error("no path from node {from} to node {to}")]
    Unreachable { from: String, to: String },
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("invalid sweep spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Core(#[from] clqaoa_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn field(path: impl Into<PathBuf>, field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Field { path: path.into(), field: field.into(), msg: msg.into() }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, e: serde_json::Error) -> Self {
        Error::Parse { path: path.into(), line: e.line(), column: e.column(), msg: e.to_string() }
    }
}
