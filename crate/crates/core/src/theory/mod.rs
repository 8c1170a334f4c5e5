//! Prover theories: axioms with their source sentences, one theorem, and an
//! optional proof sketch.

mod decls;
mod parse;
mod render;
mod sketch;
mod used;


use std::collections::HashMap;

use crate::dataset::NliInstance;
use crate::logic::{Formula, ParseError};

pub use decls::infer_declarations;
pub use parse::{parse_theory, parse_theory_patch};
pub use render::{render_goal_probe, render_theory, render_thy_file};
pub use sketch::{parse_proof_sketch, substitute_atp, ProofSketch, ProofStep, Tactic, ATP_PLACEHOLDER};
pub use used::{extract_used_axioms, ProofOutcome};

pub const ASSUMPTION_LABEL: &str = "asm";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TheoryError {
    #[error("no logical form for sentence {0:?}")]
    MissingForm(String),
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("line {line}: {message}")]
    Layout { line: usize, message: String },
    #[error("formula {label}: {source}")]
    Formula { label: String, source: ParseError },
    #[error("step {index} is out of range for a sketch of {len} steps")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("step {0} has no <ATP> placeholder")]
    NotAPlaceholder(usize),
    #[error("proof sketch has no steps")]
    EmptySketch,
    #[error("proof sketch does not end by discharging the goal")]
    NoGoalDischarge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom {
    pub label: String,
    pub comment: String,
    pub formula: Formula,
}

/// The clauses restated by a correction answer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TheoryPatch {
    pub declarations: Vec<String>,
    pub axioms: Vec<Axiom>,
    pub assumption: Option<Formula>,
    pub goal: Option<Formula>,
}

/// A formula together with the sentence it formalises.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub comment: String,
    pub formula: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoryDoc {
    pub name: String,
    /// Verbatim `typedecl` / `consts` lines.
    pub declarations: Vec<String>,
    pub axioms: Vec<Axiom>,
    pub assumption: Option<Clause>,
    pub goal: Clause,
    pub proof: Option<ProofSketch>,
}

pub fn axiom_label(k: usize) -> String {
    format!("explanation_{k}")
}

/// Theory names must be identifiers.
pub fn theory_name(id: &str) -> String {
    let mut name: String = id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect();
    if !name.starts_with(|c: char| c.is_ascii_alphabetic()) {
        name.insert_str(0, "T_");
    }
    name
}

/// Builds the theory for `instance` from per-sentence logical forms.
pub fn build_theory(instance: &NliInstance, forms: &HashMap<String, Formula>) -> Result<TheoryDoc, TheoryError> {
    let lookup = |s: &String| forms.get(s).cloned().ok_or_else(|| TheoryError::MissingForm(s.clone()));
    let premises = instance.premises.iter().map(lookup).collect::<Result<Vec<_>, _>>()?;
    let explanations = instance.explanations.iter().map(lookup).collect::<Result<Vec<_>, _>>()?;
    let hypothesis = lookup(&instance.hypothesis)?;
    Ok(TheoryDoc::assemble(
        &theory_name(&instance.id),
        &instance.premises,
        premises,
        &instance.explanations,
        explanations,
        &instance.hypothesis,
        hypothesis,
    ))
}

impl TheoryDoc {
    /// Positional variant of [`build_theory`]. Premise formulas are conjoined
    /// under a single assumption whose variables stay free.
    pub fn assemble(
        name: &str,
        premise_sentences: &[String],
        premise_forms: Vec<Formula>,
        explanation_sentences: &[String],
        explanation_forms: Vec<Formula>,
        hypothesis_sentence: &str,
        hypothesis_form: Formula,
    ) -> Self {
        let axioms: Vec<Axiom> = explanation_sentences
            .iter()
            .zip(explanation_forms)
            .enumerate()
            .map(|(i, (s, f))| Axiom { label: axiom_label(i + 1), comment: s.clone(), formula: f })
            .collect();
        if axioms.is_empty() {
            log::warn!("theory {name} has no axioms");
        }
        let assumption = (!premise_forms.is_empty())
            .then(|| Clause { comment: premise_sentences.join(" "), formula: Formula::conjoin(premise_forms) });
        TheoryDoc {
            name: name.to_string(),
            declarations: Vec::new(),
            axioms,
            assumption,
            goal: Clause { comment: hypothesis_sentence.to_string(), formula: hypothesis_form },
            proof: None,
        }
    }

    /// True when the axiom block is empty; such a theory is still rendered.
    pub fn is_degenerate(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn axiom(&self, label: &str) -> Option<&Axiom> {
        self.axioms.iter().find(|a| a.label == label)
    }

    pub fn labels(&self) -> Vec<String> {
        self.axioms.iter().map(|a| a.label.clone()).collect()
    }

    pub fn explanation_sentences(&self) -> Vec<String> {
        self.axioms.iter().map(|a| a.comment.clone()).collect()
    }

    /// Copies formulas from `corrected` by label, keeping this theory's
    /// comments. Declarations are taken over when `corrected` has any.
    pub fn apply_corrections(&self, corrected: &TheoryPatch) -> Result<TheoryDoc, TheoryError> {
        let mut out = self.clone();
        for ax in &corrected.axioms {
            let slot = out
                .axioms
                .iter_mut()
                .find(|a| a.label == ax.label)
                .ok_or_else(|| TheoryError::UnknownLabel(ax.label.clone()))?;
            slot.formula = ax.formula.clone();
        }
        match (&mut out.assumption, &corrected.assumption) {
            (Some(mine), Some(theirs)) => mine.formula = theirs.clone(),
            (None, Some(_)) => return Err(TheoryError::UnknownLabel(ASSUMPTION_LABEL.into())),
            _ => {}
        }
        if let Some(goal) = &corrected.goal {
            out.goal.formula = goal.clone();
        }
        if !corrected.declarations.is_empty() {
            out.declarations = corrected.declarations.clone();
        }
        Ok(out)
    }

    /// Keeps only the axioms whose labels are in `used` and renumbers them.
    pub fn pruned(&self, used: &std::collections::BTreeSet<String>) -> TheoryDoc {
        let mut out = self.clone();
        out.axioms = self
            .axioms
            .iter()
            .filter(|a| used.contains(&a.label))
            .enumerate()
            .map(|(i, a)| Axiom { label: axiom_label(i + 1), ..a.clone() })
            .collect();
        out.proof = None;
        out
    }
}

/// The consistency variant: same axioms and assumption, goal `False`.
pub fn build_false_theorem(t: &TheoryDoc) -> TheoryDoc {
    const SUFFIX: &str = "_consistency";
    let mut out = t.clone();
    if !out.name.ends_with(SUFFIX) {
        out.name.push_str(SUFFIX);
    }
    out.goal.formula = Formula::Falsity;
    out.proof = None;
    out
}
