//! Surface syntax: lexer, parser and canonical pretty-printer.

mod lexer;
pub mod parser;
pub mod printer;

use thiserror::Error;

pub use parser::parse;
pub use printer::{expr_to_string, stmt_to_string};

#[derive(Debug, Clone, Error)]
#[error("parse error at {line}:{col}: {msg}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

impl ParseError {
    pub fn at(line: u32, col: u32, msg: String) -> Self {
        ParseError { line, col, msg }
    }
}
