//! NLI instances and the line-delimited JSON instance files.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dataset {
    Esnli,
    Qasc,
    Worldtree,
    #[default]
    Custom,
}

/// One record of an instance file. Premises may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NliInstance {
    pub id: String,
    #[serde(default)]
    pub dataset: Dataset,
    #[serde(default)]
    pub premises: Vec<String>,
    pub hypothesis: String,
    pub explanations: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

/// Parses instance records, one JSON object per non-blank line.
pub fn parse_instances(text: &str) -> Result<Vec<NliInstance>, DatasetError> {
    let mut out = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let inst: NliInstance =
            serde_json::from_str(line).map_err(|source| DatasetError::Json { line: line_no, source })?;
        let invalid = |message: &str| DatasetError::Invalid { line: line_no, message: message.into() };
        if inst.hypothesis.trim().is_empty() {
            return Err(invalid("empty hypothesis"));
        }
        if inst.explanations.is_empty() {
            return Err(invalid("no explanations"));
        }
        if !ids.insert(inst.id.clone()) {
            return Err(invalid(&format!("duplicate id {}", inst.id)));
        }
        out.push(inst);
    }
    Ok(out)
}

pub fn load_instances(path: &Path) -> Result<Vec<NliInstance>, DatasetError> {
    let text =
        fs::read_to_string(path).map_err(|source| DatasetError::Io { path: path.display().to_string(), source })?;
    parse_instances(&text)
}

pub fn format_instances(instances: &[NliInstance]) -> String {
    let mut out = String::new();
    for inst in instances {
        out.push_str(&serde_json::to_string(inst).expect("instances serialise"));
        out.push('\n');
    }
    out
}

pub fn save_instances(path: &Path, instances: &[NliInstance]) -> std::io::Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(format_instances(instances).as_bytes())
}
