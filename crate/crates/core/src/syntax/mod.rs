//! Concrete syntax of the core language. The printer produces one line of
//! text along with the span of every subterm.

mod ast;
mod lexer;
mod parser;
mod pretty;

pub use ast::{BinOp, Expr, Path, Primitive};
pub use lexer::{escape, tokenize, tokenize_with, unescape, LexError, LexMode, Token, TokenKind, KEYWORDS};
pub use parser::{parse, parse_program, ParseError, Program};
pub use pretty::{pretty, pretty_with, to_source, Pretty, PrettyOptions, Span};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl SyntaxError {
    pub fn offset(&self) -> usize {
        match self {
            SyntaxError::Lex(e) => e.offset,
            SyntaxError::Parse(e) => e.offset,
        }
    }
}

/// Tokenizes and parses user source.
pub fn parse_str(source: &str) -> Result<Expr, SyntaxError> {
    Ok(parse(&tokenize(source)?)?)
}

pub fn parse_program_str(source: &str) -> Result<Program, SyntaxError> {
    Ok(parse_program(&tokenize(source)?)?)
}
