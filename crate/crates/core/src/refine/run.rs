use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Mutex, OnceLock};

use regex::Regex;

use super::metrics::{build_metrics, compute_utility, faithfulness_rows};
use super::{IterationRecord, PipelineStage, RefineConfig, RefinementState, RunMetrics, StageEvent, Status};
use crate::dataset::NliInstance;
use crate::informal::Embedder;
use crate::llm::{
    extract_code_block, parse_explanation_list, parse_formalisation, parse_refinement_answer, parse_syntactic_parse,
    Answer, Formalisation, LlmError, LlmGateway, Stage,
};
use crate::logic::render_formula;
use crate::prop::{derive_implications, format_logical_information, PropError};
use crate::prover::{sha256_hex, ProverSession, ProverVerdict, SyntaxErrorKind};
use crate::theory::{
    build_false_theorem, parse_theory, render_goal_probe, render_thy_file, substitute_atp, theory_name, ProofOutcome,
    ProofSketch, Tactic, TheoryDoc, TheoryError,
};

/// Why an iteration stopped early.
enum Flow {
    /// The instance cannot continue (provider or prover failure).
    Fatal(String),
    /// This iteration is lost; the next one retries with the same sentences.
    Failed(String),
}

impl From<crate::prover::ProverError> for Flow {
    fn from(e: crate::prover::ProverError) -> Self {
        Flow::Fatal(e.to_string())
    }
}

enum IterationEnd {
    Proved {
        kept: Vec<String>,
    },
    Refined(Vec<String>),
    /// Failed on the last iteration; no refinement was requested.
    OutOfBudget,
}

struct Runner<'a> {
    instance: &'a NliInstance,
    config: &'a RefineConfig,
    llm: &'a mut LlmGateway,
    prover: &'a mut ProverSession,
    last_doc: Option<TheoryDoc>,
}

/// Runs the full loop on one instance. Errors never escape: an
/// unrecoverable gateway failure ends in `Status::Aborted`.
pub fn run_instance(
    instance: &NliInstance,
    config: &RefineConfig,
    llm: &mut LlmGateway,
    prover: &mut ProverSession,
    embedder: &dyn Embedder,
) -> (RefinementState, RunMetrics) {
    let mut runner = Runner { instance, config, llm, prover, last_doc: None };
    let mut state = RefinementState {
        instance: instance.clone(),
        iteration: 0,
        explanations: instance.explanations.clone(),
        theory: None,
        status: Status::InProgress,
        llm_calls: 0,
        history: Vec::new(),
    };

    for k in 0..=config.max_iterations {
        state.iteration = k;
        let last = k == config.max_iterations;
        let mut rec = IterationRecord::new(k, state.explanations.clone());
        let result = runner.iteration(k, &state.explanations, &mut rec, last);
        rec.verdicts = runner.prover.take_log();
        rec.theory_sha256 = rec.theory_text.as_deref().map(sha256_hex);
        if let Some(prev) = state.history.last_mut() {
            link_utility(prev, &rec);
        }
        state.llm_calls = runner.llm.calls();
        let explanations = state.explanations.clone();
        match result {
            Ok(IterationEnd::Proved { kept }) => {
                state.history.push(rec);
                state.explanations = kept;
                state.status = if k == 0 { Status::ValidInitial } else { Status::ValidRefined };
                break;
            }
            Ok(IterationEnd::Refined(next)) => {
                rec.new_sentences = next.iter().filter(|s| !explanations.contains(s)).cloned().collect();
                state.history.push(rec);
                state.explanations = next;
            }
            Ok(IterationEnd::OutOfBudget) => state.history.push(rec),
            Err(Flow::Failed(reason)) => {
                log::info!("{} iteration {k} failed: {reason}", instance.id);
                rec.failure = Some(reason);
                state.history.push(rec);
            }
            Err(Flow::Fatal(reason)) => {
                log::warn!("{} aborted at iteration {k}: {reason}", instance.id);
                rec.failure = Some(reason.clone());
                state.history.push(rec);
                state.status = Status::Aborted(reason);
                break;
            }
        }
        if last {
            state.status = Status::Exhausted;
        }
    }
    debug_assert!(state.history.iter().all(|r| r.syntax_repairs <= config.max_syntax_repairs));
    state.theory = runner.last_doc.as_ref().map(render_thy_file);
    let faithfulness = runner.last_doc.as_ref().map(|d| faithfulness_rows(d, embedder)).unwrap_or_default();
    let metrics = build_metrics(&state, faithfulness);
    (state, metrics)
}

// Fills in how many of the sentences added by `prev` the proof at `next` cites.
fn link_utility(prev: &mut IterationRecord, next: &IterationRecord) {
    if !prev.events.iter().any(|e| e.stage == PipelineStage::RefineExplanation && !e.skipped) || !next.has_usage() {
        return;
    }
    let used = next.used_sentences();
    prev.used_in_next_proof = prev.new_sentences.iter().filter(|s| used.contains(s)).cloned().collect();
    let outcome = ProofOutcome { used_axiom_labels: next.used_axioms.clone(), ..ProofOutcome::default() };
    prev.utility = Some(compute_utility(&prev.new_sentences, &next.explanations, &outcome));
}

/// Runs `run_instance` over `instances` with up to `jobs` workers. Results
/// keep input order. `setup` builds the per-instance gateways; its errors
/// abort only that instance.
pub fn run_batch<F>(
    instances: &[NliInstance],
    config: &RefineConfig,
    jobs: usize,
    setup: F,
    embedder: &dyn Embedder,
) -> Vec<(RefinementState, RunMetrics)>
where
    F: Fn(&NliInstance) -> Result<(LlmGateway, ProverSession), String> + Sync,
{
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<(RefinementState, RunMetrics)>>> = Mutex::new(vec![None; instances.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, instances.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(instance) = instances.get(i) else { break };
                let out = match setup(instance) {
                    Ok((mut llm, mut prover)) => run_instance(instance, config, &mut llm, &mut prover, embedder),
                    Err(reason) => aborted(instance, reason),
                };
                results.lock().unwrap_or_else(|e| e.into_inner())[i] = Some(out);
            });
        }
    });
    results.into_inner().unwrap_or_else(|e| e.into_inner()).into_iter().flatten().collect()
}

fn aborted(instance: &NliInstance, reason: String) -> (RefinementState, RunMetrics) {
    let state = RefinementState {
        instance: instance.clone(),
        iteration: 0,
        explanations: instance.explanations.clone(),
        theory: None,
        status: Status::Aborted(reason),
        llm_calls: 0,
        history: Vec::new(),
    };
    let metrics = build_metrics(&state, Vec::new());
    (state, metrics)
}

impl Runner<'_> {
    fn iteration(
        &mut self,
        k: usize,
        explanations: &[String],
        rec: &mut IterationRecord,
        last: bool,
    ) -> Result<IterationEnd, Flow> {
        let name = format!("{}_it{k}", theory_name(&self.instance.id));

        let parsing = self.ask(
            rec,
            PipelineStage::SyntacticParse,
            Stage::SyntacticParse,
            bindings(&[("sentences", sentence_blocks(self.instance, explanations))]),
            |r| parse_syntactic_parse(r).map(|_| r.trim().to_string()),
        )?;

        let n = explanations.len();
        let form = self.ask(
            rec,
            PipelineStage::Autoformalise,
            Stage::Autoformalise,
            bindings(&[
                ("premise", premise_text(self.instance)),
                ("explanations", labelled_explanations(explanations)),
                ("hypothesis", self.instance.hypothesis.clone()),
                ("parsing", parsing),
            ]),
            |r| {
                let f = parse_formalisation(r)?;
                match (1..=n).find(|k| !f.explanations.iter().any(|(j, _)| j == k)) {
                    Some(k) => Err(format!("no logical form for explanation {k}")),
                    None => Ok(f),
                }
            },
        )?;
        let mut text = draft_theory(&name, self.instance, explanations, &form);

        let run_quantifiers = self.config.quantifier_refine && (k == 0 || !self.config.quantifier_first_iteration_only);
        if run_quantifiers {
            let answer = self.ask(
                rec,
                PipelineStage::QuantifierRefine,
                Stage::QuantifierRefine,
                bindings(&[("theory", text.clone())]),
                |r| parse_refinement_answer(Stage::QuantifierRefine, r).map_err(|e| e.to_string()),
            )?;
            if let Answer::Theory(code) = answer {
                let merged = merge_correction(&text, &code);
                event(
                    rec,
                    PipelineStage::QuantifierRefine,
                    if merged == text { "no effective change" } else { "corrected" },
                );
                text = merged;
            } else {
                event(rec, PipelineStage::QuantifierRefine, "no changes");
            }
        } else {
            skipped(rec, PipelineStage::QuantifierRefine, "disabled");
        }

        let (doc, verdict) = self.check_main(&name, text, rec, PipelineStage::ProverCheck)?;
        let (doc, verdict) = self.check_consistency(doc, verdict, rec)?;
        self.last_doc = Some(doc.clone());

        if let ProverVerdict::ProofFound { outcome } = &verdict {
            rec.proved = true;
            rec.used_axioms = outcome.used_axiom_labels.clone();
            let kept = rec.used_sentences();
            event(rec, PipelineStage::Prune, &format!("kept {} of {}", kept.len(), explanations.len()));
            return Ok(IterationEnd::Proved { kept });
        }
        skipped(rec, PipelineStage::Prune, "no proof");

        let feedback = match self.sketch_and_prove(&doc, &verdict, explanations, rec)? {
            None => {
                rec.proved = true;
                let kept = rec.used_sentences();
                event(rec, PipelineStage::Prune, &format!("kept {} of {}", kept.len(), explanations.len()));
                return Ok(IterationEnd::Proved { kept });
            }
            Some(feedback) => feedback,
        };
        rec.feedback = Some(feedback.clone());

        if last {
            skipped(rec, PipelineStage::RefineExplanation, "iteration budget exhausted");
            return Ok(IterationEnd::OutOfBudget);
        }
        let mut bare = doc.clone();
        bare.proof = None;
        let refined = self.ask(
            rec,
            PipelineStage::RefineExplanation,
            Stage::RefineExplanation,
            bindings(&[
                ("premise", premise_text(self.instance)),
                ("explanations", numbered(explanations)),
                ("hypothesis", self.instance.hypothesis.clone()),
                ("theory", render_thy_file(&bare)),
                ("feedback", feedback),
            ]),
            parse_explanation_list,
        )?;
        let mut seen = BTreeSet::new();
        let refined: Vec<String> = refined.into_iter().filter(|s| seen.insert(s.clone())).collect();
        Ok(IterationEnd::Refined(refined))
    }

    /// Prover check of the theory goal with the syntax-repair loop around it.
    fn check_main(
        &mut self,
        name: &str,
        mut text: String,
        rec: &mut IterationRecord,
        stage: PipelineStage,
    ) -> Result<(TheoryDoc, ProverVerdict), Flow> {
        loop {
            let (doc, verdict) = match parse_theory(&text) {
                Ok(mut doc) => {
                    doc.name = name.to_string();
                    let probe = render_goal_probe(&doc);
                    let verdict = self.prover.check_theory(name, &probe, &doc.labels())?;
                    rec.theory_text = Some(probe);
                    (Some(doc), verdict)
                }
                Err(e) => (None, local_syntax_error(&e)),
            };
            event(rec, stage, &verdict.summary());
            let message = match (doc, verdict) {
                (Some(doc), verdict) if !matches!(verdict, ProverVerdict::SyntaxError { .. }) => {
                    return Ok((doc, verdict))
                }
                (_, verdict) => verdict.summary(),
            };
            if !self.config.syntax_refine || rec.syntax_repairs >= self.config.max_syntax_repairs {
                return Err(Flow::Failed(format!(
                    "syntax error remains after {} repairs: {message}",
                    rec.syntax_repairs
                )));
            }
            rec.syntax_repairs += 1;
            let code = self.ask(
                rec,
                stage,
                Stage::SyntaxRefine,
                bindings(&[("theory", text.clone()), ("error", message)]),
                |r| extract_code_block(r).ok_or_else(|| "no Isabelle code found".to_string()),
            )?;
            text = merge_correction(&text, &code);
        }
    }

    /// Proves `False` from the axioms; on success asks for one repair and
    /// checks the repaired theory again.
    fn check_consistency(
        &mut self,
        doc: TheoryDoc,
        verdict: ProverVerdict,
        rec: &mut IterationRecord,
    ) -> Result<(TheoryDoc, ProverVerdict), Flow> {
        let stage = PipelineStage::ConsistencyCheck;
        let witness = match self.prove_false(&doc, rec)? {
            None => {
                event(rec, stage, "consistent");
                return Ok((doc, verdict));
            }
            Some(proof) => proof,
        };
        event(rec, stage, &format!("inconsistent: {witness}"));
        let current = render_thy_file(&doc);
        let code = self.ask(
            rec,
            stage,
            Stage::ConsistencyRefine,
            bindings(&[("theory", current.clone()), ("proof", witness)]),
            |r| extract_code_block(r).ok_or_else(|| "no Isabelle code found".to_string()),
        )?;
        rec.consistency_repaired = true;
        let (doc, verdict) = self.check_main(&doc.name, merge_correction(&current, &code), rec, stage)?;
        if let Some(proof) = self.prove_false(&doc, rec)? {
            event(rec, stage, "still inconsistent");
            return Err(Flow::Failed(format!("axioms remain inconsistent: {proof}")));
        }
        event(rec, stage, "consistency restored");
        Ok((doc, verdict))
    }

    fn prove_false(&mut self, doc: &TheoryDoc, rec: &mut IterationRecord) -> Result<Option<String>, Flow> {
        let false_doc = build_false_theorem(doc);
        let text = render_goal_probe(&false_doc);
        let verdict = self.prover.check_theory(&false_doc.name, &text, &doc.labels())?;
        rec.consistency_text = Some(text);
        Ok(match verdict {
            ProverVerdict::ProofFound { outcome } => Some(outcome.proof_text),
            _ => None,
        })
    }

    /// Logic extraction, sketch and step-wise proving. Returns the feedback
    /// for the refiner, or `None` when every step was proven.
    fn sketch_and_prove(
        &mut self,
        doc: &TheoryDoc,
        verdict: &ProverVerdict,
        explanations: &[String],
        rec: &mut IterationRecord,
    ) -> Result<Option<String>, Flow> {
        let binary = self.config.binary_feedback;
        let no_proof = |detail: String| {
            Some(if binary {
                BINARY_FEEDBACK.to_string()
            } else {
                format!("The theorem prover found no proof of the hypothesis: {detail}")
            })
        };

        let logic = if self.config.logical_relations {
            self.logic_block(explanations, rec)?
        } else {
            skipped(rec, PipelineStage::ExtractLogic, "disabled");
            skipped(rec, PipelineStage::DeriveImplications, "disabled");
            String::new()
        };
        if !logic.is_empty() {
            rec.logic = Some(logic.clone());
        }

        let sketch_bindings = bindings(&[
            ("premise", premise_text(self.instance)),
            ("explanations", numbered(explanations)),
            ("hypothesis", self.instance.hypothesis.clone()),
            ("theory", render_thy_file(doc)),
            ("logic", logic),
            ("known", doc.assumption.as_ref().map(|a| render_formula(&a.formula)).unwrap_or_else(|| "none".into())),
            ("goal", render_formula(&doc.goal.formula)),
        ]);
        let sketch = match self.llm.ask(Stage::ProofSketch, &sketch_bindings, |r| {
            match parse_refinement_answer(Stage::ProofSketch, r) {
                Ok(Answer::Sketch(s)) => Ok(atp_everywhere(s)),
                Ok(_) => Err("not a proof sketch".to_string()),
                Err(e) => Err(e.to_string()),
            }
        }) {
            Ok(s) if !s.placeholder_indices().is_empty() => s,
            Ok(_) => {
                event(rec, PipelineStage::ProofSketch, "sketch has no provable steps");
                return Ok(no_proof(verdict.summary()));
            }
            Err(e) if !e.is_fatal() => {
                event(rec, PipelineStage::ProofSketch, &e.to_string());
                return Ok(no_proof(verdict.summary()));
            }
            Err(e) => return Err(Flow::Fatal(e.to_string())),
        };
        event(rec, PipelineStage::ProofSketch, &format!("{} steps", sketch.steps.len()));

        let mut sketch = sketch;
        let mut failure = None;
        for i in sketch.placeholder_indices() {
            let verdict = self.prover.check_step(doc, &sketch, i)?;
            event(rec, PipelineStage::StepCheck, &format!("step {i}: {}", verdict.summary()));
            match verdict {
                ProverVerdict::ProofFound { outcome } => {
                    rec.used_axioms.extend(outcome.used_axiom_labels);
                    sketch = substitute_atp(&sketch, i, &outcome.proof_text)
                        .map_err(|e| Flow::Fatal(format!("cannot substitute step {i}: {e}")))?;
                }
                other => {
                    failure = Some((i, other));
                    break;
                }
            }
        }
        rec.sketch = Some(sketch.render());
        let mut proved = doc.clone();
        proved.proof = Some(sketch.clone());
        rec.theory_text = Some(render_thy_file(&proved));

        let Some((i, verdict)) = failure else { return Ok(None) };
        if binary {
            return Ok(Some(BINARY_FEEDBACK.to_string()));
        }
        let step = &sketch.steps[i];
        let mut text = String::from("The proof failed at this step:\n");
        for c in &step.comments {
            text.push_str(&format!("(* {c} *)\n"));
        }
        text.push_str(&step.statement);
        text.push('\n');
        let message = match &verdict {
            ProverVerdict::StepFailed { message, .. } => message.clone(),
            other => other.summary(),
        };
        if !message.is_empty() {
            text.push_str(&format!("Prover output: {message}\n"));
        }
        Ok(Some(text))
    }

    fn logic_block(&mut self, explanations: &[String], rec: &mut IterationRecord) -> Result<String, Flow> {
        let answer = self.llm.ask(Stage::ExtractLogic, &bindings(&[("explanations", numbered(explanations))]), |r| {
            match parse_refinement_answer(Stage::ExtractLogic, r) {
                Ok(Answer::Logic(m)) => Ok(m),
                Ok(_) => Err("not a propositional model".to_string()),
                Err(e) => Err(e.to_string()),
            }
        });
        let model = match answer {
            Ok(m) => m,
            Err(e) if !e.is_fatal() => {
                event(rec, PipelineStage::ExtractLogic, &e.to_string());
                skipped(rec, PipelineStage::DeriveImplications, "no propositional model");
                return Ok(String::new());
            }
            Err(e) => return Err(Flow::Fatal(e.to_string())),
        };
        event(
            rec,
            PipelineStage::ExtractLogic,
            &format!("{} atoms, {} relations", model.atoms.len(), model.relations.len()),
        );
        let model = match derive_implications(&model) {
            Ok(derived) => {
                event(rec, PipelineStage::DeriveImplications, &format!("{} derived", derived.derived.len()));
                derived
            }
            Err(e @ PropError::TooManyAtoms { .. }) => {
                skipped(rec, PipelineStage::DeriveImplications, &e.to_string());
                model
            }
            Err(e) => {
                skipped(rec, PipelineStage::DeriveImplications, &e.to_string());
                model
            }
        };
        Ok(format_logical_information(&model))
    }

    /// `LlmGateway::ask` with the outcome logged; malformed answers fail the
    /// iteration and anything else aborts the instance.
    fn ask<T>(
        &mut self,
        rec: &mut IterationRecord,
        pipeline: PipelineStage,
        stage: Stage,
        bindings: BTreeMap<String, String>,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<T, Flow> {
        match self.llm.ask(stage, &bindings, parse) {
            Ok(v) => {
                if pipeline != PipelineStage::QuantifierRefine {
                    event(rec, pipeline, &format!("{stage} answered"));
                }
                Ok(v)
            }
            Err(e @ LlmError::MalformedAnswer { .. }) => {
                event(rec, pipeline, &e.to_string());
                Err(Flow::Failed(e.to_string()))
            }
            Err(e) => Err(Flow::Fatal(e.to_string())),
        }
    }
}

const BINARY_FEEDBACK: &str = "The theorem prover could not prove the hypothesis from the premise and the explanation.";

fn event(rec: &mut IterationRecord, stage: PipelineStage, detail: &str) {
    rec.events.push(StageEvent { stage, skipped: false, detail: detail.to_string() });
}

fn skipped(rec: &mut IterationRecord, stage: PipelineStage, detail: &str) {
    rec.events.push(StageEvent { stage, skipped: true, detail: detail.to_string() });
}

fn bindings<const N: usize>(pairs: &[(&str, String); N]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn premise_text(instance: &NliInstance) -> String {
    if instance.premises.is_empty() {
        "none".into()
    } else {
        instance.premises.join(" ")
    }
}

fn numbered(sentences: &[String]) -> String {
    sentences.iter().enumerate().map(|(i, s)| format!("{}. {s}", i + 1)).collect::<Vec<_>>().join("\n")
}

fn labelled_explanations(sentences: &[String]) -> String {
    sentences
        .iter()
        .enumerate()
        .map(|(i, s)| format!("Explanation Sentence {}: {s}", i + 1))
        .collect::<Vec<_>>()
        .join("\n")
}

fn sentence_blocks(instance: &NliInstance, explanations: &[String]) -> String {
    let premise = if instance.premises.is_empty() { "none".to_string() } else { numbered(&instance.premises) };
    format!(
        "Premise Sentence:\n{premise}\n\nExplanation Sentence:\n{}\n\nHypothesis Sentence:\n1. {}",
        numbered(explanations),
        instance.hypothesis
    )
}

fn comment(s: &str) -> String {
    s.replace("*)", "* )").replace('\n', " ")
}

fn quoted(s: &str) -> String {
    s.replace('"', "'")
}

/// Theory text from raw answer strings, in the rendered layout. Forms are
/// not parsed here so that a bad one surfaces in the syntax loop.
pub(super) fn draft_theory(
    name: &str,
    instance: &NliInstance,
    explanations: &[String],
    form: &Formalisation,
) -> String {
    let mut out = format!("theory {name}\n  imports Main\nbegin\n\n");
    for line in &form.declarations {
        out.push_str(line);
        out.push('\n');
    }
    if !form.declarations.is_empty() {
        out.push('\n');
    }
    for (i, sentence) in explanations.iter().enumerate() {
        let k = i + 1;
        let raw = form.explanations.iter().find(|(j, _)| *j == k).map_or("", |(_, f)| f.as_str());
        out.push_str(&format!(
            "(* Explanation {k}: {} *)\naxiomatization where\n  explanation_{k}: \"{}\"\n",
            comment(sentence),
            quoted(raw)
        ));
    }
    out.push_str("theorem hypothesis:\n");
    if let (false, Some(p)) = (instance.premises.is_empty(), &form.premise) {
        out.push_str(&format!(
            "  (* Premise: {} *)\n  assumes asm: \"{}\"\n",
            comment(&instance.premises.join(" ")),
            quoted(p)
        ));
    }
    out.push_str(&format!(
        "  (* Hypothesis: {} *)\n  shows \"{}\"\nend\n",
        comment(&instance.hypothesis),
        quoted(&form.hypothesis)
    ));
    out
}

/// Copies the clauses restated in `answer` into `original` by label,
/// keeping the original's comments and layout. Declarations in the answer
/// replace the original's.
pub(super) fn merge_correction(original: &str, answer: &str) -> String {
    static RE: OnceLock<(Regex, Regex)> = OnceLock::new();
    let (labelled, shows) = RE.get_or_init(|| {
        (
            Regex::new(r#"^(\s*(?:and\s+)?(?:assumes\s+)?)([A-Za-z][A-Za-z0-9_']*)(\s*:\s*)"([^"]*)"(.*)$"#)
                .expect("static regex"),
            Regex::new(r#"^(\s*shows\s+)"([^"]*)"(.*)$"#).expect("static regex"),
        )
    });
    let mut clauses: BTreeMap<String, String> = BTreeMap::new();
    let mut goal = None;
    let mut decls = Vec::new();
    let mut in_consts = false;
    for line in answer.lines() {
        let t = line.trim();
        if t.starts_with("typedecl") || t.starts_with("consts") {
            in_consts = t.starts_with("consts");
            decls.push(line.trim_end().to_string());
            continue;
        }
        if in_consts && t.contains("::") {
            decls.push(line.trim_end().to_string());
            continue;
        }
        in_consts = false;
        if let Some(c) = shows.captures(line) {
            goal = Some(c[2].to_string());
        } else if let Some(c) = labelled.captures(line) {
            clauses.insert(c[2].to_string(), c[4].to_string());
        }
    }
    if clauses.is_empty() && goal.is_none() && decls.is_empty() {
        return original.to_string();
    }

    let mut out = Vec::new();
    let mut decls_placed = decls.is_empty();
    let mut in_consts = false;
    for line in original.lines() {
        let t = line.trim();
        if t.starts_with("typedecl") || t.starts_with("consts") || (in_consts && t.contains("::")) {
            in_consts = t.starts_with("consts") || in_consts;
            if !decls.is_empty() {
                if !decls_placed {
                    out.extend(decls.iter().cloned());
                    decls_placed = true;
                }
                continue;
            }
            out.push(line.to_string());
            continue;
        }
        in_consts = false;
        if !decls_placed && (t.starts_with("(*") || t.starts_with("axiomatization") || t.starts_with("theorem")) {
            out.extend(decls.iter().cloned());
            out.push(String::new());
            decls_placed = true;
        }
        if let Some(c) = shows.captures(line) {
            if let Some(g) = &goal {
                out.push(format!("{}\"{}\"{}", &c[1], g, &c[3]));
                continue;
            }
        } else if let Some(c) = labelled.captures(line) {
            if let Some(f) = clauses.get(&c[2]) {
                out.push(format!("{}{}{}\"{}\"{}", &c[1], &c[2], &c[3], f, &c[5]));
                continue;
            }
        }
        out.push(line.to_string());
    }
    let mut text = out.join("\n");
    text.push('\n');
    text
}

// Sketch tactics are replaced by ATP calls; empty tactics (for `fix` and
// similar) are kept.
fn atp_everywhere(mut sketch: ProofSketch) -> ProofSketch {
    for step in &mut sketch.steps {
        if matches!(&step.tactic, Tactic::Named(t) if !t.is_empty()) {
            step.tactic = Tactic::AtpPlaceholder;
        }
    }
    sketch
}

fn local_syntax_error(e: &TheoryError) -> ProverVerdict {
    let kind = match e {
        TheoryError::Formula { source, .. }
            if source.expected.contains(")")
                || source.message.contains("bracket")
                || source.message.contains("parenthes") =>
        {
            SyntaxErrorKind::MissingBracket
        }
        TheoryError::Formula { .. } => SyntaxErrorKind::InnerSyntax,
        _ => SyntaxErrorKind::Other,
    };
    let location = match e {
        TheoryError::Layout { line, .. } => Some(*line),
        _ => None,
    };
    ProverVerdict::SyntaxError { kind, message: e.to_string(), location }
}
