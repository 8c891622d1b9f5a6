//! Expression language for embedding coordinates and densities.
//!
//! Grammar (loosest binding first):
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := primary ('^' exponent)?        -- exponent must be constant
//! exponent := '-' exponent | power           -- so 2^3^2 = 2^(3^2)
//! primary  := number | 'u' | 'v' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! func     := sin | cos | tan | sinh | cosh | tanh | exp | ln | sqrt
//! ```
//!
//! Any other identifier is rejected at parse time.

mod eval;
mod lexer;
mod parser;

use thiserror::Error;

pub use eval::{eval_constant, eval_jet, eval_value};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse, Ast, BinOp, Func};

use crate::jets::JetError;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("unexpected character '{found}' at offset {position}")]
pub struct LexError {
    pub position: usize,
    pub found: char,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at offset {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> Self {
        Self {
            position,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("evaluation error at offset {position}: {source}")]
pub struct EvalError {
    pub position: usize,
    #[source]
    pub source: JetError,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl ExprError {
    pub fn position(&self) -> usize {
        match self {
            ExprError::Lex(e) => e.position,
            ExprError::Parse(e) => e.position,
        }
    }
}

/// Tokenize and parse in one step.
pub fn parse_expr(src: &str) -> Result<Ast, ExprError> {
    Ok(parse(&tokenize(src)?)?)
}
