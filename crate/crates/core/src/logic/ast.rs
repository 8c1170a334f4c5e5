use std::fmt;

/// An argument position of a predicate.
///
/// Whether an identifier is a variable or a constant is decided at parse time:
/// it is a variable when an enclosing quantifier binds it or when its name
/// starts with a lower-case letter, and a constant otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }
}

/// First-order logical form in the Neo-Davidsonian fragment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Predicate { name: String, args: Vec<Term> },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists { vars: Vec<String>, body: Box<Formula> },
    Forall { vars: Vec<String>, body: Box<Formula> },
    Truth,
    Falsity,
}

impl Formula {
    pub fn pred(name: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Predicate { name: name.into(), args }
    }

    /// Predicate applied to variables only, the common case in event semantics.
    pub fn pred_vars(name: &str, vars: &[&str]) -> Self {
        Formula::pred(name, vars.iter().map(|v| Term::var(*v)).collect())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Self {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    pub fn exists<S: Into<String>>(vars: impl IntoIterator<Item = S>, body: Formula) -> Self {
        Formula::Exists { vars: vars.into_iter().map(Into::into).collect(), body: Box::new(body) }
    }

    pub fn forall<S: Into<String>>(vars: impl IntoIterator<Item = S>, body: Formula) -> Self {
        Formula::Forall { vars: vars.into_iter().map(Into::into).collect(), body: Box::new(body) }
    }

    /// Left-nested conjunction of `parts`, matching how `a ∧ b ∧ c` parses.
    /// Returns `Truth` for an empty iterator.
    pub fn conjoin(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut iter = parts.into_iter();
        match iter.next() {
            None => Formula::Truth,
            Some(first) => iter.fold(first, Formula::and),
        }
    }

    /// Flattens nested conjunctions into a left-to-right list.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::And(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    /// Free variables in left-to-right first-occurrence order.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut bound: Vec<String> = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    /// All predicate names, in first-occurrence order.
    pub fn predicate_names(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        self.visit_predicates(&mut |name, _| {
            if !out.contains(&name) {
                out.push(name);
            }
        });
        out
    }

    pub fn visit_predicates<'a>(&'a self, f: &mut impl FnMut(&'a str, &'a [Term])) {
        match self {
            Formula::Predicate { name, args } => f(name, args),
            Formula::Not(a) => a.visit_predicates(f),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.visit_predicates(f);
                r.visit_predicates(f);
            }
            Formula::Exists { body, .. } | Formula::Forall { body, .. } => body.visit_predicates(f),
            Formula::Truth | Formula::Falsity => {}
        }
    }

    /// Number of nodes on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Predicate { .. } | Formula::Truth | Formula::Falsity => 1,
            Formula::Not(a) => 1 + a.depth(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
                1 + l.depth().max(r.depth())
            }
            Formula::Exists { body, .. } | Formula::Forall { body, .. } => 1 + body.depth(),
        }
    }
}

fn collect_free(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<String>) {
    match f {
        Formula::Predicate { args, .. } => {
            for t in args {
                if let Term::Var(v) = t {
                    if !bound.contains(v) && !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            }
        }
        Formula::Not(a) => collect_free(a, bound, out),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
            collect_free(l, bound, out);
            collect_free(r, bound, out);
        }
        Formula::Exists { vars, body } | Formula::Forall { vars, body } => {
            let mark = bound.len();
            bound.extend(vars.iter().cloned());
            collect_free(body, bound, out);
            bound.truncate(mark);
        }
        Formula::Truth | Formula::Falsity => {}
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::render_formula(self))
    }
}

/// Character range inside a parsed string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub offset: usize,
    pub length: usize,
}

impl SourceSpan {
    pub fn new(offset: usize, length: usize) -> Self {
        Self { offset, length }
    }
}
