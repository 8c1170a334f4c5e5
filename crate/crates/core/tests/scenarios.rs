mod support;

use std::fs;

use nli_refine::dataset::format_instances;
use nli_refine::llm::write_llm_cassette;
use nli_refine::prover::write_prover_cassette;
use nli_refine::refine::{format_history, metrics_csv, Status};

// Set to rewrite the stored cassettes after an intended change.
const REGENERATE: &str = "NLI_REFINE_REGENERATE";

#[test]
fn stored_cassettes_match_a_fresh_recording() {
    for name in support::SCENARIOS {
        let rec = support::record(name);
        let dir = support::fixture_dir(name);
        let tmp = tempfile::tempdir().unwrap();
        let out = if std::env::var_os(REGENERATE).is_some() { dir.clone() } else { tmp.path().to_path_buf() };
        write_llm_cassette(&out.join("llm.jsonl"), &rec.llm).unwrap();
        write_prover_cassette(&out.join("prover.jsonl"), &rec.prover).unwrap();
        fs::write(out.join("instance.jsonl"), format_instances(&[support::instance(name)])).unwrap();
        for file in ["llm.jsonl", "prover.jsonl", "instance.jsonl"] {
            let stored = fs::read_to_string(dir.join(file)).unwrap_or_default();
            let fresh = fs::read_to_string(out.join(file)).unwrap();
            assert_eq!(stored, fresh, "{name}/{file} is stale; rerun with {REGENERATE}=1");
        }
    }
}

#[test]
fn replay_reproduces_the_recording() {
    for name in support::SCENARIOS {
        let rec = support::record(name);
        let (state, metrics) = support::replay(name);
        assert_eq!(state.status, rec.state.status, "{name}");
        assert_eq!(format_history(&state), format_history(&rec.state));
        assert_eq!(metrics_csv(&[metrics]), metrics_csv(&[rec.metrics]));
    }
}

#[test]
fn scenario_outcomes() {
    let (violin, _) = support::replay("violin");
    assert_eq!(violin.status, Status::ValidInitial);
    let (viruses, metrics) = support::replay("viruses");
    assert_eq!(viruses.status, Status::ValidRefined);
    assert_eq!(metrics.iterations_used, 1);
    assert_eq!(viruses.explanations.len(), 4);
}
