use serde::{Deserialize, Serialize};

use super::{RefinementState, Status};
use crate::informal::{faithfulness, Embedder};
use crate::theory::{ProofOutcome, TheoryDoc, ASSUMPTION_LABEL};

/// Informalisation of one clause and its similarity to the source sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaithfulnessRow {
    pub label: String,
    pub original: String,
    pub informalised: String,
    /// `None` when the clause could not be informalised or embedded.
    pub similarity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityRow {
    pub iteration: usize,
    pub new_sentences: usize,
    pub used_in_next_proof: usize,
    pub utility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub id: String,
    pub status: Status,
    pub init_valid: bool,
    pub final_valid: bool,
    pub iterations_used: usize,
    pub llm_calls: usize,
    pub utility: Vec<UtilityRow>,
    pub final_explanations: Vec<String>,
    pub faithfulness: Vec<FaithfulnessRow>,
}

/// Share of the sentences added by a refinement that the next proof cites;
/// 1.0 when nothing was added.
pub fn compute_utility(new_sentences: &[String], next_explanations: &[String], next_proof: &ProofOutcome) -> f64 {
    if new_sentences.is_empty() {
        return 1.0;
    }
    let used: Vec<&String> = next_explanations
        .iter()
        .enumerate()
        .filter(|(i, _)| next_proof.used_axiom_labels.contains(&crate::theory::axiom_label(i + 1)))
        .map(|(_, s)| s)
        .collect();
    new_sentences.iter().filter(|s| used.contains(s)).count() as f64 / new_sentences.len() as f64
}

/// One row per axiom, then the assumption and the goal.
pub fn faithfulness_rows(doc: &TheoryDoc, embedder: &dyn Embedder) -> Vec<FaithfulnessRow> {
    let mut clauses: Vec<(String, &str, &crate::logic::Formula)> =
        doc.axioms.iter().map(|a| (a.label.clone(), a.comment.as_str(), &a.formula)).collect();
    if let Some(asm) = &doc.assumption {
        clauses.push((ASSUMPTION_LABEL.to_string(), &asm.comment, &asm.formula));
    }
    clauses.push(("hypothesis".to_string(), &doc.goal.comment, &doc.goal.formula));
    clauses
        .into_iter()
        .map(|(label, original, f)| match faithfulness(original, f, embedder) {
            Ok(r) => FaithfulnessRow {
                label,
                original: r.original,
                informalised: r.informalised,
                similarity: Some(r.similarity),
            },
            Err(e) => {
                log::debug!("{label}: {e}");
                FaithfulnessRow { label, original: original.to_string(), informalised: String::new(), similarity: None }
            }
        })
        .collect()
}

pub(super) fn build_metrics(state: &RefinementState, faithfulness: Vec<FaithfulnessRow>) -> RunMetrics {
    let iterations_used = match state.status {
        Status::Aborted(_) if state.history.is_empty() => 0,
        _ => state.iteration,
    };
    RunMetrics {
        id: state.instance.id.clone(),
        status: state.status.clone(),
        init_valid: state.status == Status::ValidInitial,
        final_valid: state.status.is_valid(),
        iterations_used,
        llm_calls: state.llm_calls,
        utility: state
            .history
            .iter()
            .filter_map(|r| {
                r.utility.map(|u| UtilityRow {
                    iteration: r.iteration,
                    new_sentences: r.new_sentences.len(),
                    used_in_next_proof: r.used_in_next_proof.len(),
                    utility: u,
                })
            })
            .collect(),
        final_explanations: state.explanations.clone(),
        faithfulness,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub instances: usize,
    pub valid_initial: usize,
    pub valid_refined: usize,
    pub exhausted: usize,
    pub aborted: usize,
    /// Percentages of all instances.
    pub init_pct: f64,
    pub final_pct: f64,
    /// Means over valid instances, or over all instances when
    /// `averaged_over_all` is set. `None` when the population is empty.
    pub mean_iterations: Option<f64>,
    pub mean_calls: Option<f64>,
    pub averaged_over_all: bool,
    /// Mean utility over refinements that added sentences.
    pub mean_utility: Option<f64>,
    pub mean_faithfulness: Option<f64>,
}

pub fn aggregate_metrics(runs: &[RunMetrics], average_over_all: bool) -> AggregateReport {
    let count = |f: &dyn Fn(&Status) -> bool| runs.iter().filter(|r| f(&r.status)).count();
    let pct = |n: usize| if runs.is_empty() { 0.0 } else { 100.0 * n as f64 / runs.len() as f64 };
    let valid_initial = count(&|s| *s == Status::ValidInitial);
    let valid_refined = count(&|s| *s == Status::ValidRefined);
    let population: Vec<&RunMetrics> = runs.iter().filter(|r| average_over_all || r.final_valid).collect();
    let utilities: Vec<f64> =
        runs.iter().flat_map(|r| &r.utility).filter(|u| u.new_sentences > 0).map(|u| u.utility).collect();
    let similarities: Vec<f64> = runs.iter().flat_map(|r| &r.faithfulness).filter_map(|f| f.similarity).collect();
    AggregateReport {
        instances: runs.len(),
        valid_initial,
        valid_refined,
        exhausted: count(&|s| *s == Status::Exhausted),
        aborted: count(&|s| matches!(s, Status::Aborted(_))),
        init_pct: pct(valid_initial),
        final_pct: pct(valid_initial + valid_refined),
        mean_iterations: mean(population.iter().map(|r| r.iterations_used as f64)),
        mean_calls: mean(population.iter().map(|r| r.llm_calls as f64)),
        averaged_over_all: average_over_all,
        mean_utility: mean(utilities.into_iter()),
        mean_faithfulness: mean(similarities.into_iter()),
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}
