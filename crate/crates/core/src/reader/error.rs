use thiserror::Error;

use super::lexer::Pos;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReadErrorKind {
    #[error("unterminated quoted atom or string")]
    UnterminatedQuoted,
    #[error("unterminated block comment")]
    UnterminatedComment,
    #[error("invalid escape sequence")]
    BadEscape,
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected token {0:?}")]
    UnexpectedToken(String),
    #[error("expected {expected}, found {found:?}")]
    Expected { expected: &'static str, found: String },
    #[error("unexpected end of input")]
    UnexpectedEof,
    #[error("operator priority clash at {0:?}")]
    PriorityClash(String),
    #[error("integer literal does not fit in 64 bits")]
    IntegerOverflow,
    #[error("double-quoted strings are not supported")]
    StringsUnsupported,
    #[error("directives are not supported")]
    DirectiveUnsupported,
    #[error("clause head is not callable")]
    NotCallable,
    #[error("clause body is not callable")]
    BodyNotCallable,
}

/// A syntax error with its source position. `clause` is the 0-based index
/// of the clause being read when consulting a program.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}{pos}: {kind}", clause.map(|c| format!("clause {c}, ")).unwrap_or_default())]
pub struct ReadError {
    pub kind: ReadErrorKind,
    pub pos: Pos,
    pub clause: Option<usize>,
}

impl ReadError {
    pub fn new(kind: ReadErrorKind, pos: Pos) -> Self {
        ReadError {
            kind,
            pos,
            clause: None,
        }
    }
}
