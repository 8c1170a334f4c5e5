//! First-order logical forms: AST, parser and renderer.
//!
//! The parser accepts Unicode (`∃ ∀ ¬ ∧ ∨ ⟶ ⟷`), ASCII (`EX ALL ~ & | --> <->`)
//! and Isabelle symbol (`\<exists>` ...) spellings together with both curried
//! (`Agent e x`) and tupled (`Agent(e, x)`) application. The renderer always
//! emits Unicode and curried application.

mod ast;
mod events;
mod lexer;
mod parser;
mod render;

use std::collections::BTreeSet;
use std::fmt;

pub use ast::{Formula, SourceSpan, Term};
pub use events::{event_vars, EVENT_ROLES};
pub use parser::parse_formula;
pub use render::render_formula;

/// Free variables of `f` in first-occurrence order.
pub fn free_vars(f: &Formula) -> Vec<String> {
    f.free_vars()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: BTreeSet<String>,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new<'a>(
        span: SourceSpan,
        expected: impl IntoIterator<Item = &'a str>,
        message: impl Into<String>,
    ) -> Self {
        Self { span, expected: expected.into_iter().map(str::to_owned).collect(), message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let expected: Vec<&str> = self.expected.iter().map(String::as_str).collect();
        write!(
            f,
            "parse error at character {} ({}): expected {}",
            self.span.offset,
            self.message,
            expected.join(" or ")
        )
    }
}

#[cfg(test)]
mod tests;
