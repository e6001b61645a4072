use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("unknown symbol `{name}` at offset {offset}")]
    UnknownSymbol { name: String, offset: usize },
    #[error("arity mismatch for `{name}` at offset {offset}: expected {expected}, found {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        offset: usize,
    },
    #[error("invalid path {0:?}")]
    InvalidPath(Vec<usize>),
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("expected {expected} labels, got {found}")]
    LabelCount { expected: usize, found: usize },
    #[error("reduction has an open leaf: {0}")]
    OpenLeaf(String),
    #[error("interpretation does not satisfy the side-conditions")]
    Unsatisfied,
    #[error("formula is not polarizable: {0}")]
    NotPolarizable(String),
    #[error("not tractable: {0}")]
    NotTractable(String),
    #[error("rule `{0}` is not basic")]
    NotBasic(String),
    #[error("model sweep bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn syntax<T>(offset: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Syntax {
        offset,
        msg: msg.into(),
    })
}
