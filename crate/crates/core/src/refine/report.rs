use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

use super::{AggregateReport, FaithfulnessRow, RefinementState, RunMetrics};

#[derive(Serialize)]
struct HistoryLine<'a> {
    iteration: usize,
    #[serde(flatten)]
    event: &'a super::StageEvent,
}

/// One JSON record per stage event.
pub fn format_history(state: &RefinementState) -> String {
    let mut out = String::new();
    for rec in &state.history {
        for event in &rec.events {
            let line = HistoryLine { iteration: rec.iteration, event };
            out.push_str(&serde_json::to_string(&line).expect("history records serialise"));
            out.push('\n');
        }
    }
    out
}

pub fn metrics_csv(runs: &[RunMetrics]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record([
        "id",
        "status",
        "init_valid",
        "final_valid",
        "iterations_used",
        "llm_calls",
        "utility",
        "final_explanations",
    ]);
    for r in runs {
        let utility: Vec<String> = r.utility.iter().map(|u| format!("{}:{:.4}", u.iteration, u.utility)).collect();
        let _ = w.write_record([
            r.id.clone(),
            r.status.label().to_string(),
            r.init_valid.to_string(),
            r.final_valid.to_string(),
            r.iterations_used.to_string(),
            r.llm_calls.to_string(),
            utility.join(" "),
            r.final_explanations.len().to_string(),
        ]);
    }
    String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
}

fn faithfulness_csv(runs: &[RunMetrics]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record(["id", "label", "original", "informalised", "similarity"]);
    for r in runs {
        for f in &r.faithfulness {
            let similarity = f.similarity.map(|s| format!("{s:.4}")).unwrap_or_default();
            let _ = w.write_record([&r.id, &f.label, &f.original, &f.informalised, &similarity]);
        }
    }
    String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
}

/// Faithfulness rows of a single theory, without an id column.
pub fn faithfulness_table(rows: &[FaithfulnessRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record(["label", "original", "informalised", "similarity"]);
    for f in rows {
        let similarity = f.similarity.map(|s| format!("{s:.4}")).unwrap_or_default();
        let _ = w.write_record([&f.label, &f.original, &f.informalised, &similarity]);
    }
    String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
}

/// Writes `<run>/<id>/<iteration>/{main.thy, consistency.thy, verdicts.log}`
/// and `<run>/<id>/history.jsonl`.
pub fn write_instance_artifacts(run_dir: &Path, state: &RefinementState) -> io::Result<()> {
    let dir = run_dir.join(crate::theory::theory_name(&state.instance.id));
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("history.jsonl"), format_history(state))?;
    for rec in &state.history {
        let it = dir.join(rec.iteration.to_string());
        fs::create_dir_all(&it)?;
        if let Some(text) = &rec.theory_text {
            fs::write(it.join("main.thy"), text)?;
        }
        if let Some(text) = &rec.consistency_text {
            fs::write(it.join("consistency.thy"), text)?;
        }
        let mut log = String::new();
        for v in &rec.verdicts {
            log.push_str(&serde_json::to_string(v).map_err(io::Error::other)?);
            log.push('\n');
        }
        fs::write(it.join("verdicts.log"), log)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Report<'a> {
    aggregate: &'a AggregateReport,
    instances: &'a [RunMetrics],
}

/// Writes `metrics.csv`, `faithfulness.csv` and `report.json` into `run_dir`.
pub fn write_reports(run_dir: &Path, runs: &[RunMetrics], aggregate: &AggregateReport) -> io::Result<()> {
    fs::create_dir_all(run_dir)?;
    fs::write(run_dir.join("metrics.csv"), metrics_csv(runs))?;
    fs::write(run_dir.join("faithfulness.csv"), faithfulness_csv(runs))?;
    let report = Report { aggregate, instances: runs };
    let mut json = serde_json::to_string_pretty(&report).map_err(io::Error::other)?;
    json.push('\n');
    fs::write(run_dir.join("report.json"), json)
}
