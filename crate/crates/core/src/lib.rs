//! Verification and refinement of natural-language explanations for NLI.
//!
//! Explanations are autoformalised into Neo-Davidsonian logical forms,
//! assembled into prover theories, checked by an external theorem prover and
//! refined from failed proof steps. The LLM and the prover sit behind
//! replayable gateways so that whole runs can be reproduced offline.

pub mod dataset;
pub mod informal;
pub mod llm;
pub mod logic;
pub mod prop;
pub mod prover;
pub mod refine;
pub mod theory;

pub use dataset::{Dataset, NliInstance};
pub use logic::{free_vars, parse_formula, render_formula, Formula, ParseError, SourceSpan, Term};
pub use prop::{PropAtom, PropFormula, PropositionalModel};
pub use theory::{Axiom, Clause, ProofOutcome, ProofSketch, ProofStep, Tactic, TheoryDoc};
