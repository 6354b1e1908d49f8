//! Crate-wide error type.

use thiserror::Error;

/// A 1-based source location used by every parse diagnostic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SourceSpan {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

impl SourceSpan {
    pub fn new(file: &str, line: u32, column: u32) -> SourceSpan {
        debug_assert!(line >= 1 && column >= 1);
        SourceSpan {
            file: file.to_owned(),
            line,
            column,
        }
    }
}

impl std::fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Error, Debug)]
pub enum Error {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: SourceSpan, message: String },

    #[error("{span}: identifier '{name}' uses the reserved '__' prefix")]
    ReservedIdentifier { span: SourceSpan, name: String },

    #[error("arity conflict: predicate '{pred}' used with arity {found}, previously {expected}")]
    ArityConflict {
        pred: String,
        expected: usize,
        found: usize,
    },

    #[error("non-ground atom: {0}")]
    NonGround(String),

    #[error("functional term not allowed here: {0}")]
    FunctionalTerm(String),

    #[error("unknown variable ?{0}")]
    UnknownVariable(String),

    #[error("equality atom not allowed here: {0}")]
    EqualityNotAllowed(String),

    #[error("invalid normalisation split: {0}")]
    InvalidSplit(String),

    #[error("marking does not cover {0}")]
    MarkingIncomplete(String),

    #[error("inapplicable request: {0}")]
    Inapplicable(String),

    #[error("chase exceeded {0} limit")]
    ChaseLimit(String),

    #[error("operation requires a fixpoint chase outcome, got {0}")]
    NonFixpoint(String),

    #[error("metrics undefined on an empty store")]
    EmptyStore,

    #[error("oracle bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
