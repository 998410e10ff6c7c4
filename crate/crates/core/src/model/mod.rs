//! Model descriptions: the DSL, the built-in library and report output.

mod lexer;
mod library;
mod parse;
pub mod report;
mod spec;

use thiserror::Error;

pub use library::{builtin, builtin_source, library, LIBRARY_NAMES};
pub use parse::{parse_ansatz, parse_expr, parse_model};
pub use spec::{render_model, ModelSpec, SymbolTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UndeclaredSymbol,
    Arity,
    TripleIndex,
    Invalid,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, col: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            col,
            kind: ParseErrorKind::Syntax,
            message: message.into(),
        }
    }

    pub(crate) fn with_kind(mut self, kind: ParseErrorKind) -> ParseError {
        self.kind = kind;
        self
    }
}
