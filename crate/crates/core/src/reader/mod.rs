//! Tokenizer, operator-precedence parser and term printer.

mod error;
mod lexer;
mod ops;
mod parser;
mod writer;

pub use error::{ReadError, ReadErrorKind};
pub use lexer::{tokenize, Pos, Token, TokenKind};
pub use ops::{Fixity, OpDef, OpType, OperatorTable};
pub use parser::{
    parse_program, parse_program_with, parse_term, read_term, read_term_with, ParsedTerm, Parser,
};
pub use writer::{format_clause, format_term, format_term_in, quote_atom};
