//! Program language: tokens, AST, parser and canonical printer.
//!
//! The grammar is a ProbLog-flavoured subset. Statements end with `.`, comments run from
//! `%` to end of line, and facts carry one of the labels below:
//!
//! ```text
//! 0.25 :: cloudy.                      % probabilistic
//! t(0.8) :: humid.                     % learnable probability
//! nn(cloudnet, [18, 998]) :: c(18, 998).  % neural
//! {0.3, 0.7} :: f.                     % algebraic (semiring-defined text)
//! x_h ~ beta(4, 2).                    % distributional
//! [x_h > 0.6] :: humid.                % indicator
//! 0.25 :: cloudy(D) :- day(D).         % annotated rule
//! ```

mod ast;
mod lexer;
mod parser;
mod printer;

pub use ast::*;
pub use lexer::{tokenize, Position, Spanned, Token};
pub use parser::{parse_program, parse_query};
pub use printer::{
    atom_to_string, clause_to_string, constraint_to_string, distribution_to_string, distributional_to_string,
    fact_to_string, label_prefix, literal_to_string, number_to_string, pretty_print, term_to_string,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SyntaxError {
    #[error("{pos}: lexical error: {msg}")]
    Lex { pos: Position, msg: String },
    #[error("{pos}: syntax error: {msg}")]
    Parse { pos: Position, msg: String },
    #[error("{pos}: invalid program: {msg}")]
    Validation { pos: Position, msg: String },
    #[error("{pos}: unsupported feature: {msg}")]
    Unsupported { pos: Position, msg: String },
}

impl SyntaxError {
    pub(crate) fn lex(pos: Position, msg: impl Into<String>) -> Self {
        SyntaxError::Lex { pos, msg: msg.into() }
    }

    pub(crate) fn parse(pos: Position, msg: impl Into<String>) -> Self {
        SyntaxError::Parse { pos, msg: msg.into() }
    }

    pub(crate) fn validation(pos: Position, msg: impl Into<String>) -> Self {
        SyntaxError::Validation { pos, msg: msg.into() }
    }

    pub(crate) fn unsupported(pos: Position, msg: impl Into<String>) -> Self {
        SyntaxError::Unsupported { pos, msg: msg.into() }
    }

    pub fn position(&self) -> Position {
        match self {
            SyntaxError::Lex { pos, .. }
            | SyntaxError::Parse { pos, .. }
            | SyntaxError::Validation { pos, .. }
            | SyntaxError::Unsupported { pos, .. } => *pos,
        }
    }
}
