use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use nli_refine::dataset::NliInstance;
use nli_refine::informal::{Embedder, HttpEmbedder, LexicalEmbedder};
use nli_refine::llm::{
    load_llm_cassette, write_llm_cassette, HttpProvider, LlmCassetteRecord, LlmGateway, LlmProvider, RecordingProvider,
    ReplayProvider, TemplateSet,
};
use nli_refine::prover::{
    load_prover_cassette, write_prover_cassette, GroundProver, MockProver, ProcessProver, ProverBackend,
    ProverCassetteRecord, ProverSession, RecordingProver,
};
use nli_refine::refine::{aggregate_metrics, run_batch, write_instance_artifacts, write_reports, RunMetrics};
use nli_refine::theory::theory_name;

use crate::config::{EmbedderConfig, Mode, RunConfig};

type Records = (Arc<Mutex<Vec<LlmCassetteRecord>>>, Arc<Mutex<Vec<ProverCassetteRecord>>>);

pub fn embedder(config: Option<&EmbedderConfig>) -> Option<Box<dyn Embedder>> {
    config.map(|c| {
        Box::new(HttpEmbedder::new(
            &c.endpoint,
            &c.model,
            c.api_key_env.as_deref(),
            Duration::from_secs(c.timeout_secs),
        )) as Box<dyn Embedder>
    })
}

fn prover_backend(config: &RunConfig) -> Box<dyn ProverBackend> {
    match &config.prover_command {
        Some(cmd) => Box::new(ProcessProver::new(
            cmd.clone(),
            config.prover_workdir.clone(),
            Duration::from_secs(config.prover_timeout),
        )),
        None => Box::new(GroundProver),
    }
}

/// Runs the batch, writes artifacts and reports under `config.out` and
/// returns a one-line summary.
pub fn run(instances: &[NliInstance], config: &RunConfig) -> Result<String, String> {
    let templates = Arc::new(match &config.templates {
        Some(dir) => TemplateSet::load_dir(dir).map_err(|e| e.to_string())?,
        None => TemplateSet::builtin(),
    });
    // one provider for the whole batch so its rate limiter is shared
    let live: Option<Arc<dyn LlmProvider>> =
        (config.mode != Mode::Replay).then(|| Arc::new(HttpProvider::new(config.provider.clone())) as _);
    let recorded: Mutex<BTreeMap<String, Records>> = Mutex::new(BTreeMap::new());
    let backoff = Duration::from_secs(1);

    let setup = |instance: &NliInstance| -> Result<(LlmGateway, ProverSession), String> {
        let name = theory_name(&instance.id);
        let (provider, backend): (Arc<dyn LlmProvider>, Box<dyn ProverBackend>) = match config.mode {
            Mode::Live => (live.clone().expect("live provider"), prover_backend(config)),
            Mode::Record => {
                let provider = RecordingProvider::new(live.clone().expect("live provider"));
                let prover = RecordingProver::new(prover_backend(config));
                recorded.lock().unwrap().insert(name, (provider.records(), prover.records()));
                (Arc::new(provider), Box::new(prover))
            }
            Mode::Replay => {
                let dir = config.cassette.as_ref().expect("validated").join(&name);
                let llm = load_llm_cassette(&dir.join("llm.jsonl")).map_err(|e| e.to_string())?;
                let prover = load_prover_cassette(&dir.join("prover.jsonl")).map_err(|e| e.to_string())?;
                (Arc::new(ReplayProvider::new(llm)), Box::new(MockProver::new(prover)))
            }
        };
        let gateway = LlmGateway::new(provider, templates.clone()).with_retries(config.provider.max_retries, backoff);
        Ok((gateway, ProverSession::new(backend)))
    };

    let embedder = embedder(config.embedder.as_ref());
    let results =
        run_batch(instances, &config.refine, config.jobs, setup, embedder.as_deref().unwrap_or(&LexicalEmbedder));

    let io = |p: &Path, e: std::io::Error| format!("{}: {e}", p.display());
    for (state, _) in &results {
        write_instance_artifacts(&config.out, state).map_err(|e| io(&config.out, e))?;
    }
    let runs: Vec<RunMetrics> = results.into_iter().map(|(_, m)| m).collect();
    let aggregate = aggregate_metrics(&runs, config.average_over_all);
    write_reports(&config.out, &runs, &aggregate).map_err(|e| io(&config.out, e))?;

    if config.mode == Mode::Record {
        let root = config.cassette.as_ref().expect("validated");
        for (name, (llm, prover)) in recorded.into_inner().unwrap() {
            let dir = root.join(name);
            let path = dir.join("llm.jsonl");
            write_llm_cassette(&path, &llm.lock().unwrap()).map_err(|e| io(&path, e))?;
            let path = dir.join("prover.jsonl");
            write_prover_cassette(&path, &prover.lock().unwrap()).map_err(|e| io(&path, e))?;
        }
    }

    let pct = |v: f64| format!("{v:.1}%");
    let mean = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.2}"));
    Ok(format!(
        "{} instances: init {} final {} | exhausted {} aborted {} | #iter {} #calls {} | reports in {}",
        aggregate.instances,
        pct(aggregate.init_pct),
        pct(aggregate.final_pct),
        aggregate.exhausted,
        aggregate.aborted,
        mean(aggregate.mean_iterations),
        mean(aggregate.mean_calls),
        config.out.display()
    ))
}
