//! Scripted runs of the two runtime examples and helpers to record and
//! replay them through cassettes.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nli_refine::dataset::{Dataset, NliInstance};
use nli_refine::informal::LexicalEmbedder;
use nli_refine::llm::{
    load_llm_cassette, LlmCassetteRecord, LlmGateway, RecordingProvider, ReplayProvider, ScriptedProvider, Stage,
    TemplateSet,
};
use nli_refine::prover::{
    load_prover_cassette, MockProver, ProverCassetteRecord, ProverReply, ProverRequest, ProverSession, RecordingProver,
    RequestKind, ScriptedProver,
};
use nli_refine::refine::{run_instance, RefineConfig, RefinementState, RunMetrics};

pub const SCENARIOS: [&str; 2] = ["violin", "viruses"];

pub const PARSE: &str = "Premise Sentence:\n1. A smiling woman is playing the violin.\nSubject: A smiling woman\nVerb Phrase: is playing the violin\n - Main Verb: playing\n - Auxiliary Verb: is\nDirect Object: the violin\n";

pub const REFINED: [&str; 4] = [
    "Some viruses have an envelope of phospholipids and proteins.",
    "Proteins are sometimes coats of a virus.",
    "An envelope can be considered a type of coating.",
    "Phospholipids are a component of the envelope of some viruses.",
];

pub fn violin() -> NliInstance {
    NliInstance {
        id: "esnli-violin".into(),
        dataset: Dataset::Esnli,
        premises: vec!["A smiling woman is playing the violin in front of a turquoise background.".into()],
        hypothesis: "A woman is playing an instrument.".into(),
        explanations: vec!["A violin is an instrument.".into()],
    }
}

pub fn viruses() -> NliInstance {
    NliInstance {
        id: "qasc-viruses".into(),
        dataset: Dataset::Qasc,
        premises: vec![],
        hypothesis: "Some viruses have a coating of phospholipids.".into(),
        explanations: REFINED[..2].iter().map(|s| s.to_string()).collect(),
    }
}

pub fn instance(name: &str) -> NliInstance {
    match name {
        "violin" => violin(),
        "viruses" => viruses(),
        other => panic!("unknown scenario {other}"),
    }
}

pub const VIOLIN_FORMS: &str = "Premise: Woman x ∧ Smiling x ∧ Violin y ∧ Play e ∧ Agent e x ∧ Patient e y ∧ TurquoiseBackground z ∧ InFrontOf x z\n\
Explanation 1: ∀x. Violin x ⟶ Instrument x\n\
Hypothesis: ∃x y e. Woman x ∧ Instrument y ∧ Play e ∧ Agent e x ∧ Patient e y\n";

const VIRUS_FORMS_0: &str = "Premise: none\n\
Explanation 1: ∃x y z. Virus x ∧ Envelope y ∧ Phospholipids z ∧ Proteins z ∧ Have x y ∧ MadeOf y z\n\
Explanation 2: ∃x y. Proteins x ∧ Virus y ∧ CoatOf x y\n\
Hypothesis: ∃x y z. Virus x ∧ Coating y ∧ Phospholipids z ∧ Have x y ∧ MadeOf y z\n";

const VIRUS_FORMS_1: &str = "Premise: none\n\
Explanation 1: ∃x y z. Virus x ∧ Envelope y ∧ Phospholipids z ∧ Proteins z ∧ Have x y ∧ MadeOf y z\n\
Explanation 2: ∃x y. Proteins x ∧ Virus y ∧ CoatOf x y\n\
Explanation 3: ∀x. Envelope x ⟶ Coating x\n\
Explanation 4: ∀x y z. Virus x ∧ Envelope y ∧ Have x y ∧ MadeOf y z ⟶ Phospholipids z\n\
Hypothesis: ∃x y z. Virus x ∧ Coating y ∧ Phospholipids z ∧ Have x y ∧ MadeOf y z\n";

const VIRUS_LOGIC: &str = "Logical Propositions:\n\
A: some viruses have an envelope of phospholipids and proteins (from Explanatory Sentence 1)\n\
B: proteins are coats of a virus (from Explanatory Sentence 2)\n\
Logical Relations:\nnone\n";

pub const VIRUS_SKETCH: &str = "proof -\n\
\x20 (* From Explanation 1, some virus has an envelope made of phospholipids. *)\n\
\x20 from explanation_1 obtain x y z where \"Virus x ∧ Envelope y ∧ Phospholipids z ∧ Have x y ∧ MadeOf y z\" <ATP>\n\
\x20 (* The envelope still has to be shown to be a coating. *)\n\
\x20 then show ?thesis <ATP>\n\
qed\n";

pub fn refined_answer() -> String {
    let mut s = String::from("Refined Explanation Sentences:\n");
    for (i, r) in REFINED.iter().enumerate() {
        s.push_str(&format!("{}. {r}\n", i + 1));
    }
    s
}

pub fn answers(pairs: &[(Stage, &[&str])]) -> BTreeMap<Stage, Vec<String>> {
    pairs.iter().map(|(s, a)| (*s, a.iter().map(|x| x.to_string()).collect())).collect()
}

pub fn llm_script(name: &str) -> BTreeMap<Stage, Vec<String>> {
    match name {
        "violin" => answers(&[
            (Stage::SyntacticParse, &[PARSE]),
            (Stage::Autoformalise, &[VIOLIN_FORMS]),
            (Stage::QuantifierRefine, &["No changes"]),
        ]),
        "viruses" => answers(&[
            (Stage::SyntacticParse, &[PARSE]),
            (Stage::Autoformalise, &[VIRUS_FORMS_0, VIRUS_FORMS_1]),
            (Stage::QuantifierRefine, &["No changes"]),
            (Stage::ExtractLogic, &[VIRUS_LOGIC]),
            (Stage::ProofSketch, &[VIRUS_SKETCH]),
            (Stage::RefineExplanation, &[&refined_answer()]),
        ]),
        other => panic!("unknown scenario {other}"),
    }
}

pub fn prover_script(name: &str) -> impl FnMut(&ProverRequest) -> ProverReply + Send + 'static {
    let name = name.to_string();
    move |r: &ProverRequest| {
        let raw = if r.theory_name.ends_with("_consistency") {
            "No proof found"
        } else {
            match (name.as_str(), r.kind) {
                ("violin", _) => "Try this: using asm explanation_1 by blast (4 ms)",
                (_, RequestKind::Theory) if r.theory_name.ends_with("_it0") => "No proof found",
                (_, RequestKind::Theory) => {
                    "Try this: using explanation_1 explanation_3 explanation_4 explanation_2 by blast (31 ms)"
                }
                (_, RequestKind::Step(0)) => "Try this: using explanation_1 by blast (2 ms)",
                (_, RequestKind::Step(_)) => "No proof found",
            }
        };
        ProverReply::raw(raw)
    }
}

fn templates() -> Arc<TemplateSet> {
    Arc::new(TemplateSet::builtin())
}

pub struct Recording {
    pub llm: Vec<LlmCassetteRecord>,
    pub prover: Vec<ProverCassetteRecord>,
    pub state: RefinementState,
    pub metrics: RunMetrics,
}

/// Runs a scenario against its scripts, keeping both cassettes.
pub fn record(name: &str) -> Recording {
    let recorder = Arc::new(RecordingProvider::new(Arc::new(ScriptedProvider::per_stage(llm_script(name)))));
    let llm_records = recorder.records();
    let mut llm = LlmGateway::new(recorder, templates());
    let prover_backend = RecordingProver::new(ScriptedProver::new(prover_script(name)));
    let prover_records = prover_backend.records();
    let mut prover = ProverSession::new(Box::new(prover_backend));
    let (state, metrics) =
        run_instance(&instance(name), &RefineConfig::default(), &mut llm, &mut prover, &LexicalEmbedder);
    let llm = llm_records.lock().unwrap().clone();
    let prover = prover_records.lock().unwrap().clone();
    Recording { llm, prover, state, metrics }
}

pub fn fixture_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/scenarios").join(name)
}

/// Runs a scenario from its stored cassettes alone.
pub fn replay(name: &str) -> (RefinementState, RunMetrics) {
    let dir = fixture_dir(name);
    let llm_records = load_llm_cassette(&dir.join("llm.jsonl")).expect("llm cassette");
    let prover_records = load_prover_cassette(&dir.join("prover.jsonl")).expect("prover cassette");
    let mut llm = LlmGateway::new(Arc::new(ReplayProvider::new(llm_records)), templates());
    let mut prover = ProverSession::new(Box::new(MockProver::new(prover_records)));
    run_instance(&instance(name), &RefineConfig::default(), &mut llm, &mut prover, &LexicalEmbedder)
}

/// Runs `instance` against per-stage answers and a prover script whose
/// consistency probes never find a proof.
pub fn scripted_run(
    instance: &NliInstance,
    answers: BTreeMap<Stage, Vec<String>>,
    mut prover: impl FnMut(&ProverRequest) -> &'static str + Send + 'static,
    config: &RefineConfig,
) -> (RefinementState, RunMetrics, LlmGateway) {
    let mut llm = LlmGateway::new(Arc::new(ScriptedProvider::per_stage(answers)), templates());
    let backend = ScriptedProver::new(move |r: &ProverRequest| {
        if r.theory_name.ends_with("_consistency") {
            ProverReply::raw("No proof found")
        } else {
            ProverReply::raw(prover(r))
        }
    });
    let mut session = ProverSession::new(Box::new(backend));
    let (state, metrics) = run_instance(instance, config, &mut llm, &mut session, &LexicalEmbedder);
    (state, metrics, llm)
}
