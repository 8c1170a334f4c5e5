use std::collections::HashMap;

use super::{PropError, PropFormula};

/// Upper bound on distinct atoms for exhaustive enumeration.
pub const MAX_ATOMS: usize = 20;

/// Index of each atom symbol into an assignment bitmask.
pub(crate) struct AtomIndex<'a> {
    pub symbols: Vec<&'a str>,
    positions: HashMap<&'a str, usize>,
}

impl<'a> AtomIndex<'a> {
    pub fn build(formulas: impl IntoIterator<Item = &'a PropFormula>) -> Result<Self, PropError> {
        let mut symbols = Vec::new();
        for f in formulas {
            f.collect_atoms(&mut symbols);
        }
        Self::from_symbols(symbols)
    }

    pub fn from_symbols(symbols: Vec<&'a str>) -> Result<Self, PropError> {
        if symbols.len() > MAX_ATOMS {
            return Err(PropError::TooManyAtoms { count: symbols.len(), limit: MAX_ATOMS });
        }
        let positions = symbols.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Ok(Self { symbols, positions })
    }

    pub fn assignments(&self) -> impl Iterator<Item = u32> {
        0..(1u32 << self.symbols.len())
    }

    pub fn eval(&self, f: &PropFormula, assignment: u32) -> bool {
        match f {
            PropFormula::Atom(s) => {
                let i = self.positions[s.as_str()];
                assignment & (1 << i) != 0
            }
            PropFormula::Not(a) => !self.eval(a, assignment),
            PropFormula::And(xs) => xs.iter().all(|x| self.eval(x, assignment)),
            PropFormula::Or(xs) => xs.iter().any(|x| self.eval(x, assignment)),
            PropFormula::Implies(a, b) => !self.eval(a, assignment) || self.eval(b, assignment),
            PropFormula::Equivalent(xs) => match xs.split_first() {
                None => true,
                Some((first, rest)) => {
                    let v = self.eval(first, assignment);
                    rest.iter().all(|x| self.eval(x, assignment) == v)
                }
            },
            PropFormula::True => true,
            PropFormula::False => false,
        }
    }
}

/// True iff every assignment satisfying all `premises` satisfies `goal`.
pub fn entails(premises: &[PropFormula], goal: &PropFormula) -> Result<bool, PropError> {
    let index = AtomIndex::build(premises.iter().chain(std::iter::once(goal)))?;
    Ok(index.assignments().filter(|&a| premises.iter().all(|p| index.eval(p, a))).all(|a| index.eval(goal, a)))
}

/// True iff `f` and `g` agree on every assignment.
pub fn equivalent(f: &PropFormula, g: &PropFormula) -> Result<bool, PropError> {
    let index = AtomIndex::build([f, g])?;
    Ok(index.assignments().all(|a| index.eval(f, a) == index.eval(g, a)))
}

pub fn is_satisfiable(formulas: &[PropFormula]) -> Result<bool, PropError> {
    let index = AtomIndex::build(formulas)?;
    Ok(index.assignments().any(|a| formulas.iter().all(|f| index.eval(f, a))))
}
