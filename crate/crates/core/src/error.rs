use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("I/O error: {0}")]
    Stream(#[from] std::io::Error),

    #[error("line {line}: malformed record: {reason}")]
    Malformed { line: usize, reason: String },

    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { line: usize, id: String },

    #[error("duplicate document id {0:?}")]
    DuplicateDocument(String),

    #[error("line {line}: parse error: {reason}")]
    Parse { line: usize, reason: String },

    #[error("line {line}: schema error: {reason}")]
    Schema { line: usize, reason: String },

    #[error("run format error: {0}")]
    RunFormat(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("incompatible index: {0}")]
    IncompatibleIndex(String),

    #[error("corrupt index: {0}")]
    CorruptIndex(String),

    #[error("retrieval error: {0}")]
    Retrieval(String),

    #[error("pseudo-relevance feedback unavailable: initial retrieval returned no documents")]
    PrfUnavailable,

    #[error("annotator failed on window {window}: {source}")]
    Annotator {
        window: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("degenerate test: {0}")]
    DegenerateTest(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("stage-2 scores missing top-50 candidates: {}", format_pairs(.0))]
    Coverage(Vec<(String, String)>),

    #[error("unknown {kind} {name:?} (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
}

fn format_pairs(pairs: &[(String, String)]) -> String {
    pairs
        .iter()
        .map(|(q, d)| format!("({q}, {d})"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
