//! Inputs shared by the benchmarks.

use nli_refine::{PropAtom, PropFormula, PropositionalModel};

/// A chain `P0 → P1 → … → P(n-1)` with every atom declared.
pub fn implication_chain(n: usize) -> PropositionalModel {
    let symbol = |i: usize| format!("P{i}");
    PropositionalModel {
        atoms: (0..n)
            .map(|i| PropAtom { symbol: symbol(i), gloss: format!("proposition {i}"), source_sentence: Some(i + 1) })
            .collect(),
        relations: (1..n)
            .map(|i| PropFormula::implies(PropFormula::atom(symbol(i - 1)), PropFormula::atom(symbol(i))))
            .collect(),
        derived: Vec::new(),
    }
}

pub const EVENT_FORM: &str =
    "∀x y e. Woman x ∧ Violin y ∧ Play e ∧ Agent e x ∧ Patient e y ⟶ (∃z. Instrument z ∧ Patient e z)";

pub const PARK_BENCH: &str = include_str!("../../core/tests/fixtures/park_bench.thy");
