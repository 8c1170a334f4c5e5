//! Propositional layer over extracted explanation facts.
//!
//! An LLM lists atomic propositions (with natural-language glosses) and the
//! relations between them. This module parses that answer, decides
//! entailment by exhaustive truth-table enumeration and derives the
//! literal-to-literal implications that follow from the relations without
//! restating any of them.

mod derive;
mod eval;
mod format;
mod parse;
mod simplify;

use std::fmt;

pub use derive::derive_implications;
pub use eval::{entails, equivalent, is_satisfiable, MAX_ATOMS};
pub use format::format_logical_information;
pub use parse::parse_logical_information;
pub use simplify::simplify;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PropError {
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("line {line}: relation refers to undeclared atom {symbol:?}")]
    UndeclaredAtom { symbol: String, line: usize },
    #[error("atom symbol {symbol:?} declared twice (after sanitisation)")]
    DuplicateAtom { symbol: String },
    #[error("{count} atoms exceed the truth-table limit of {limit}")]
    TooManyAtoms { count: usize, limit: usize },
}

/// A named proposition, e.g. `A: it is raining (from Explanatory Sentence 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropAtom {
    pub symbol: String,
    pub gloss: String,
    /// 1-based explanation index the proposition was read from.
    pub source_sentence: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PropFormula {
    Atom(String),
    Not(Box<PropFormula>),
    And(Vec<PropFormula>),
    Or(Vec<PropFormula>),
    Implies(Box<PropFormula>, Box<PropFormula>),
    Equivalent(Vec<PropFormula>),
    True,
    False,
}

impl PropFormula {
    pub fn atom(s: impl Into<String>) -> Self {
        PropFormula::Atom(s.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: PropFormula) -> Self {
        PropFormula::Not(Box::new(f))
    }

    pub fn implies(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn equivalent(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::Equivalent(vec![a, b])
    }

    /// Atom symbols in first-occurrence order.
    pub fn atoms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            PropFormula::Atom(s) => {
                if !out.contains(&s.as_str()) {
                    out.push(s);
                }
            }
            PropFormula::Not(a) => a.collect_atoms(out),
            PropFormula::And(xs) | PropFormula::Or(xs) | PropFormula::Equivalent(xs) => {
                xs.iter().for_each(|x| x.collect_atoms(out))
            }
            PropFormula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            PropFormula::True | PropFormula::False => {}
        }
    }

    /// Renders with every atom symbol replaced by `name(symbol)`.
    pub fn render_with(&self, name: &dyn Fn(&str) -> String) -> String {
        let list = |xs: &[PropFormula]| xs.iter().map(|x| x.render_with(name)).collect::<Vec<_>>().join(", ");
        match self {
            PropFormula::Atom(s) => name(s),
            PropFormula::Not(a) => format!("Not({})", a.render_with(name)),
            PropFormula::And(xs) => format!("And({})", list(xs)),
            PropFormula::Or(xs) => format!("Or({})", list(xs)),
            PropFormula::Equivalent(xs) => format!("Equivalent({})", list(xs)),
            PropFormula::Implies(a, b) => {
                format!("Implies({}, {})", a.render_with(name), b.render_with(name))
            }
            PropFormula::True => "True".to_owned(),
            PropFormula::False => "False".to_owned(),
        }
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(&|s| s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub atom: String,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: impl Into<String>) -> Self {
        Self { atom: atom.into(), positive: true }
    }

    pub fn neg(atom: impl Into<String>) -> Self {
        Self { atom: atom.into(), positive: false }
    }

    pub fn to_formula(&self) -> PropFormula {
        let a = PropFormula::Atom(self.atom.clone());
        if self.positive {
            a
        } else {
            PropFormula::not(a)
        }
    }
}

/// A derived `antecedent → consequent` between two literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Implication {
    pub antecedent: Literal,
    pub consequent: Literal,
}

impl Implication {
    pub fn new(antecedent: Literal, consequent: Literal) -> Self {
        Self { antecedent, consequent }
    }

    pub fn to_formula(&self) -> PropFormula {
        PropFormula::implies(self.antecedent.to_formula(), self.consequent.to_formula())
    }
}

impl fmt::Display for Implication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_formula().fmt(f)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PropositionalModel {
    pub atoms: Vec<PropAtom>,
    pub relations: Vec<PropFormula>,
    pub derived: Vec<Implication>,
}

impl PropositionalModel {
    pub fn atom(&self, symbol: &str) -> Option<&PropAtom> {
        self.atoms.iter().find(|a| a.symbol == symbol)
    }

    /// False when the relations admit no satisfying assignment.
    pub fn is_consistent(&self) -> Result<bool, PropError> {
        is_satisfiable(&self.relations)
    }
}
