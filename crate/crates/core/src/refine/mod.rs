//! The refinement loop: formalise, repair, prove, sketch, and rewrite the
//! explanation from prover feedback until the theorem holds or the
//! iteration budget runs out.

mod metrics;
mod report;
mod run;


use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dataset::NliInstance;
use crate::prover::VerdictLogEntry;

pub use metrics::{
    aggregate_metrics, compute_utility, faithfulness_rows, AggregateReport, FaithfulnessRow, RunMetrics, UtilityRow,
};
pub use report::{faithfulness_table, format_history, metrics_csv, write_instance_artifacts, write_reports};
pub use run::{run_batch, run_instance};

/// Loop limits and ablation switches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RefineConfig {
    /// Refinement rounds after the initial attempt; 0 verifies only.
    pub max_iterations: usize,
    pub max_syntax_repairs: usize,
    pub quantifier_refine: bool,
    /// Run the quantifier critique at iteration 0 only.
    pub quantifier_first_iteration_only: bool,
    pub syntax_refine: bool,
    pub logical_relations: bool,
    /// Report only provable/unprovable to the explanation refiner.
    pub binary_feedback: bool,
}

impl Default for RefineConfig {
    fn default() -> Self {
        RefineConfig {
            max_iterations: 10,
            max_syntax_repairs: 5,
            quantifier_refine: true,
            quantifier_first_iteration_only: false,
            syntax_refine: true,
            logical_relations: true,
            binary_feedback: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason")]
pub enum Status {
    InProgress,
    ValidInitial,
    ValidRefined,
    Exhausted,
    Aborted(String),
}

impl Status {
    pub fn is_valid(&self) -> bool {
        matches!(self, Status::ValidInitial | Status::ValidRefined)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Status::InProgress => "in_progress",
            Status::ValidInitial => "valid_initial",
            Status::ValidRefined => "valid_refined",
            Status::Exhausted => "exhausted",
            Status::Aborted(_) => "aborted",
        }
    }
}

/// Pipeline steps in their per-iteration order. A prover check and the
/// syntax repairs it triggers share a position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineStage {
    SyntacticParse,
    Autoformalise,
    QuantifierRefine,
    ProverCheck,
    ConsistencyCheck,
    Prune,
    ExtractLogic,
    DeriveImplications,
    ProofSketch,
    StepCheck,
    RefineExplanation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageEvent {
    pub stage: PipelineStage,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub skipped: bool,
    pub detail: String,
}

/// Everything that happened in one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub explanations: Vec<String>,
    pub theory_sha256: Option<String>,
    /// The last main theory file submitted (goal probe or sketch).
    pub theory_text: Option<String>,
    pub consistency_text: Option<String>,
    pub events: Vec<StageEvent>,
    pub verdicts: Vec<VerdictLogEntry>,
    pub syntax_repairs: usize,
    pub consistency_repaired: bool,
    pub logic: Option<String>,
    pub sketch: Option<String>,
    /// Explanation labels cited by the proof or by proven sketch steps.
    pub used_axioms: BTreeSet<String>,
    pub proved: bool,
    pub feedback: Option<String>,
    pub failure: Option<String>,
    /// Sentences the refinement added for the next iteration.
    pub new_sentences: Vec<String>,
    /// The subset of `new_sentences` cited at the next iteration.
    pub used_in_next_proof: Vec<String>,
    pub utility: Option<f64>,
}

impl IterationRecord {
    fn new(iteration: usize, explanations: Vec<String>) -> Self {
        IterationRecord {
            iteration,
            explanations,
            theory_sha256: None,
            theory_text: None,
            consistency_text: None,
            events: Vec::new(),
            verdicts: Vec::new(),
            syntax_repairs: 0,
            consistency_repaired: false,
            logic: None,
            sketch: None,
            used_axioms: BTreeSet::new(),
            proved: false,
            feedback: None,
            failure: None,
            new_sentences: Vec::new(),
            used_in_next_proof: Vec::new(),
            utility: None,
        }
    }

    /// Sentences of this iteration whose axioms were cited.
    pub fn used_sentences(&self) -> Vec<String> {
        self.explanations
            .iter()
            .enumerate()
            .filter(|(i, _)| self.used_axioms.contains(&crate::theory::axiom_label(i + 1)))
            .map(|(_, s)| s.clone())
            .collect()
    }

    /// Whether a proof or a proven step cited anything.
    pub fn has_usage(&self) -> bool {
        self.proved || !self.used_axioms.is_empty()
    }
}

/// Per-instance loop state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementState {
    pub instance: NliInstance,
    pub iteration: usize,
    pub explanations: Vec<String>,
    /// Rendered text of the current theory, if one parsed.
    pub theory: Option<String>,
    pub status: Status,
    pub llm_calls: usize,
    pub history: Vec<IterationRecord>,
}
