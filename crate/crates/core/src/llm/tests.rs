use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use super::*;

fn squash(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn bind(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn gateway(provider: impl LlmProvider + 'static) -> LlmGateway {
    LlmGateway::new(Arc::new(provider), Arc::new(TemplateSet::builtin())).with_retries(3, Duration::from_millis(1))
}

#[test]
fn builtin_templates_cover_their_slots() {
    let set = TemplateSet::builtin();
    for &stage in Stage::ALL {
        let t = set.get(stage);
        let allowed: Vec<_> = allowed_slots(stage).iter().map(|s| s.to_string()).collect();
        assert_eq!(t.slots.iter().cloned().collect::<Vec<_>>().len(), allowed.len(), "{stage}");
        assert!(!t.reminder.is_empty(), "{stage}");
        assert!(!t.system.contains("##"), "{stage} keeps note lines");
    }
}

#[test]
fn quantifier_prompt_keeps_published_wording() {
    let set = TemplateSet::builtin();
    let p = set.get(Stage::QuantifierRefine).render(&bind(&[("theory", "THEORY TEXT")])).unwrap();
    let sys = squash(&p.system);
    assert!(sys.contains("may not be defined correctly.There might be missing variables after the quantifiers"));
    let user = squash(&p.user);
    assert!(user
        .contains("Provided Iabelle code: (* Explanation 1: Many consumers feed at more than one trophic level. *)"));
    assert!(user.ends_with("Provided Isabelle code: THEORY TEXT Answer:"));
}

#[test]
fn syntactic_parse_prompt_fragment() {
    let set = TemplateSet::builtin();
    let p = set.get(Stage::SyntacticParse).render(&bind(&[("sentences", "Premise Sentence:\nnone")])).unwrap();
    assert!(squash(&p.system).starts_with(
        "You are an expert in linguistics. You will be provided with some sentences, please do a syntactic parse for each word in that sentence."
    ));
    assert!(squash(&p.user).contains("Subject: A woman Verb Phrase: is playing an instrument - Main Verb: playing"));
    assert!(p.user.contains("Premise Sentence:\nnone"));
}

#[test]
fn missing_and_unknown_slots_are_errors() {
    let set = TemplateSet::builtin();
    let t = set.get(Stage::SyntaxRefine);
    assert!(matches!(t.render(&bind(&[("theory", "x")])), Err(LlmError::MissingSlot { name, .. }) if name == "error"));
    assert!(matches!(
        t.render(&bind(&[("theory", "x"), ("error", "y"), ("bogus", "z")])),
        Err(LlmError::UnknownSlot { name, .. }) if name == "bogus"
    ));
    let bad = PromptTemplate::parse(Stage::SyntaxRefine, "[user]\n{{theory}} {{nope}}\n");
    assert!(matches!(bad, Err(LlmError::UnknownSlot { name, .. }) if name == "nope"));
    assert!(matches!(PromptTemplate::parse(Stage::SyntaxRefine, "[system]\nhi\n"), Err(LlmError::Template { .. })));
}

#[test]
fn substitution_is_single_pass() {
    let set = TemplateSet::builtin();
    let p = set.get(Stage::QuantifierRefine).render(&bind(&[("theory", "{{theory}}")])).unwrap();
    assert!(p.user.contains("{{theory}}"));
}

#[test]
fn empty_premise_is_bound_as_none() {
    let set = TemplateSet::builtin();
    let p = set
        .get(Stage::Autoformalise)
        .render(&bind(&[
            ("premise", "none"),
            ("explanations", "Explanation Sentence 1: A violin is an instrument."),
            ("hypothesis", "A woman is playing a violin."),
            ("parsing", "..."),
        ]))
        .unwrap();
    assert!(p.user.contains("Premise Sentence: none\nExplanation Sentence 1: A violin"));
}

#[test]
fn load_dir_overrides_one_stage() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("syntax_refine.txt"), "[system]\nS\n[user]\nfix {{theory}} given {{error}}\n")
        .unwrap();
    let set = TemplateSet::load_dir(dir.path()).unwrap();
    let p = set.get(Stage::SyntaxRefine).render(&bind(&[("theory", "T"), ("error", "E")])).unwrap();
    assert_eq!(p.user.trim(), "fix T given E");
    assert_eq!(set.get(Stage::QuantifierRefine), TemplateSet::builtin().get(Stage::QuantifierRefine));
}

#[test]
fn replay_hits_and_misses() {
    let set = TemplateSet::builtin();
    let prompt = set.get(Stage::QuantifierRefine).render(&bind(&[("theory", "A")])).unwrap();
    let other = set.get(Stage::QuantifierRefine).render(&bind(&[("theory", "B")])).unwrap();
    let replay = ReplayProvider::new(vec![
        LlmCassetteRecord { stage: prompt.stage, prompt_sha256: prompt.digest(), response: "first".into() },
        LlmCassetteRecord { stage: prompt.stage, prompt_sha256: prompt.digest(), response: "second".into() },
    ]);
    assert_eq!(replay.complete(&prompt).unwrap().text, "first");
    assert_eq!(replay.complete(&prompt).unwrap().text, "second");
    assert_eq!(replay.complete(&prompt).unwrap().text, "second");
    match replay.complete(&other) {
        Err(LlmError::CassetteMiss { stage, digest }) => {
            assert_eq!(stage, Stage::QuantifierRefine);
            assert_eq!(digest, other.digest());
        }
        r => panic!("expected miss, got {r:?}"),
    }
}

#[test]
fn cassette_round_trip_through_recording() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sub/llm.jsonl");
    let recorder =
        Arc::new(RecordingProvider::new(Arc::new(ScriptedProvider::new(|p| Ok(format!("echo {}", p.stage))))));
    let records = recorder.records();
    let mut gw = LlmGateway::new(recorder, Arc::new(TemplateSet::builtin()));
    let prompt = gw.render(Stage::QuantifierRefine, &bind(&[("theory", "A")])).unwrap();
    gw.complete(&prompt).unwrap();
    write_llm_cassette(&path, &records.lock().unwrap()).unwrap();
    let loaded = load_llm_cassette(&path).unwrap();
    assert_eq!(loaded.len(), 1);
    let mut replayed = gateway(ReplayProvider::new(loaded));
    assert_eq!(replayed.complete(&prompt).unwrap(), "echo quantifier_refine");
}

#[test]
fn rate_limit_retries_count_one_call() {
    let attempts = Arc::new(AtomicUsize::new(0));
    let seen = Arc::clone(&attempts);
    let mut gw = gateway(ScriptedProvider::new(move |_| {
        if seen.fetch_add(1, Ordering::SeqCst) < 2 {
            Err(LlmError::RateLimited { retry_after: Some(Duration::from_millis(1)) })
        } else {
            Ok("ok".into())
        }
    }));
    let prompt = gw.render(Stage::QuantifierRefine, &bind(&[("theory", "A")])).unwrap();
    assert_eq!(gw.complete(&prompt).unwrap(), "ok");
    assert_eq!(attempts.load(Ordering::SeqCst), 3);
    assert_eq!(gw.calls(), 1);
}

#[test]
fn rate_limit_gives_up_after_budget() {
    let mut gw = gateway(ScriptedProvider::new(|_| Err(LlmError::RateLimited { retry_after: Some(Duration::ZERO) })));
    let prompt = gw.render(Stage::QuantifierRefine, &bind(&[("theory", "A")])).unwrap();
    assert!(matches!(gw.complete(&prompt), Err(LlmError::RateLimited { .. })));
    assert_eq!(gw.calls(), 0);
}

#[test]
fn malformed_answer_is_asked_again_once() {
    let answers = BTreeMap::from([(
        Stage::RefineExplanation,
        vec!["I cannot help.".to_string(), "1. A violin is an instrument.".to_string()],
    )]);
    let mut gw = gateway(ScriptedProvider::per_stage(answers));
    let b =
        bind(&[("premise", "none"), ("explanations", "1. x"), ("hypothesis", "h"), ("theory", "t"), ("feedback", "f")]);
    let list = gw.ask(Stage::RefineExplanation, &b, parse_explanation_list).unwrap();
    assert_eq!(list, vec!["A violin is an instrument."]);
    assert_eq!(gw.calls(), 2);
    assert!(gw.history()[1].prompt.contains("Your previous answer could not be used"));

    let mut stubborn = gateway(ScriptedProvider::new(|_| Ok("no".into())));
    let err = stubborn.ask(Stage::RefineExplanation, &b, parse_explanation_list).unwrap_err();
    assert!(matches!(err, LlmError::MalformedAnswer { stage: Stage::RefineExplanation, .. }));
    assert!(!err.is_fatal());
    assert_eq!(stubborn.calls(), 2);
}

#[test]
fn parses_quantifier_answer() {
    let answer = "Explanation 1 states \"Many consumers\" ... We should use '∃' instead.\n\
        Refined code:\n```isabelle\n(* Explanation 1: Many consumers feed. *)\naxiomatization where\n  explanation_1: \"∃x e. Consumer x ∧ Feed e ∧ Agent e x\"\n```\n";
    match parse_refinement_answer(Stage::QuantifierRefine, answer).unwrap() {
        Answer::Theory(code) => {
            assert!(code.starts_with("(* Explanation 1"));
            assert!(code.contains("∃x e."));
            assert!(!code.contains("```"));
        }
        a => panic!("{a:?}"),
    }
    assert_eq!(parse_refinement_answer(Stage::QuantifierRefine, "No changes.").unwrap(), Answer::Unchanged);
    assert!(parse_refinement_answer(Stage::SyntaxRefine, "No changes.").is_err());
}

#[test]
fn code_without_fences_starts_at_theory_line() {
    let answer = "Here it is:\naxiomatization where\n  explanation_1: \"∀x. A x ⟶ B x\"\n";
    assert_eq!(extract_code_block(answer).unwrap(), "axiomatization where\n  explanation_1: \"∀x. A x ⟶ B x\"\n");
    assert_eq!(extract_code_block("nothing useful"), None);
}

#[test]
fn parses_numbered_explanations() {
    let answer = "Refined Explanation Sentences:\n1. A violin is an instrument.\n2. Playing a violin is playing an instrument.\n3) Women are people.\n- 4. \"A violin has strings.\"\n";
    let list = parse_explanation_list(answer).unwrap();
    assert_eq!(list.len(), 4);
    assert_eq!(list[3], "A violin has strings.");
    let labelled = parse_explanation_list("Explanation 1: A.\nExplanation Sentence 2: B.").unwrap();
    assert_eq!(labelled, vec!["A.", "B."]);
    assert!(matches!(
        parse_refinement_answer(Stage::RefineExplanation, "Sorry, I cannot."),
        Err(LlmError::MalformedAnswer { .. })
    ));
}

#[test]
fn parses_formalisation_lines() {
    let answer = "Premise: none\nExplanation 1: ∀x. Violin x ⟶ Instrument x\nExplanation 2: ∀x. Woman x ⟶ Person x\nHypothesis: ∃x y e. Woman x ∧ Violin y ∧ Play e ∧ Agent e x ∧ Patient e y\n";
    let f = parse_formalisation(answer).unwrap();
    assert_eq!(f.premise, None);
    assert_eq!(f.explanations.len(), 2);
    assert_eq!(f.explanations[1], (2, "∀x. Woman x ⟶ Person x".to_string()));
    assert!(f.hypothesis.starts_with("∃x y e."));
    assert!(parse_formalisation("Explanation 1: A x").is_err());
}

#[test]
fn parses_theory_shaped_formalisation() {
    let answer = "```isabelle\ntypedecl entity\nconsts\n  Man :: \"entity ⇒ bool\"\n(* Explanation 1: x *)\naxiomatization where\n  explanation_1: \"∀x. Man x ⟶ Person x\"\n\ntheorem hypothesis:\n  assumes asm: \"Man m\"\n  shows \"∃x. Person x\"\n```";
    let f = parse_formalisation(answer).unwrap();
    assert_eq!(f.declarations.len(), 3);
    assert_eq!(f.premise.as_deref(), Some("Man m"));
    assert_eq!(f.explanations, vec![(1, "∀x. Man x ⟶ Person x".to_string())]);
    assert_eq!(f.hypothesis, "∃x. Person x");
}

#[test]
fn parses_syntactic_parse_blocks() {
    let answer = "Premise Sentence:\n1. A woman plays.\nSubject: A woman\nVerb Phrase: plays\n - Main Verb: plays\nExplanation Sentence:\n1. A violin is an instrument.\nSubject: A violin\n";
    let p = parse_syntactic_parse(answer).unwrap();
    assert_eq!(p.len(), 2);
    assert_eq!(p[0].roles.len(), 3);
    assert_eq!(p[0].roles[2], ("Main Verb".to_string(), "plays".to_string()));
    assert!(parse_syntactic_parse("Subject: x").is_err());
}

#[test]
fn parses_logic_and_sketch_answers() {
    let logic = "Some reasoning first.\nLogical Propositions:\nA: a violin (from Explanation 1)\nB: an instrument (from Explanation 1)\nLogical Relations:\nImplies(A, B)\n";
    match parse_refinement_answer(Stage::ExtractLogic, logic).unwrap() {
        Answer::Logic(m) => {
            assert_eq!(m.atoms.len(), 2);
            assert_eq!(m.relations.len(), 1);
        }
        a => panic!("{a:?}"),
    }
    let sketch = "```isabelle\nproof -\n  from asm have \"Violin v\" <ATP>\n  then show ?thesis <ATP>\nqed\n```";
    match parse_refinement_answer(Stage::ProofSketch, sketch).unwrap() {
        Answer::Sketch(s) => assert_eq!(s.placeholder_indices(), vec![0, 1]),
        a => panic!("{a:?}"),
    }
}

#[test]
fn rate_limiter_spaces_calls() {
    let limiter = RateLimiter::per_minute(60 * 50);
    let start = std::time::Instant::now();
    for _ in 0..4 {
        limiter.acquire();
    }
    assert!(start.elapsed() >= Duration::from_millis(55));
    let free = RateLimiter::per_minute(0);
    let start = std::time::Instant::now();
    for _ in 0..100 {
        free.acquire();
    }
    assert!(start.elapsed() < Duration::from_millis(50));
}
