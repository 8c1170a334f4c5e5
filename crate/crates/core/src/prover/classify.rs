use std::sync::OnceLock;

use regex::Regex;
use serde::Deserialize;

use super::{ProverVerdict, SyntaxErrorKind};
use crate::theory::ProofOutcome;

const DEFAULT_TABLE: &str = include_str!("../../data/prover_patterns.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RuleVerdict {
    Syntax,
    Proof,
    Timeout,
    NoProof,
}

#[derive(Deserialize)]
struct RawRule {
    verdict: RuleVerdict,
    kind: Option<SyntaxErrorKind>,
    regex: String,
}

#[derive(Deserialize)]
struct RawTable {
    rule: Vec<RawRule>,
}

struct Rule {
    verdict: RuleVerdict,
    kind: SyntaxErrorKind,
    regex: Regex,
}

/// Ordered regex rules mapping raw prover output to verdicts.
pub struct PatternTable {
    rules: Vec<Rule>,
    location: Regex,
}

#[derive(Debug, thiserror::Error)]
pub enum PatternError {
    #[error("pattern table: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("pattern table rule {index}: {source}")]
    Regex { index: usize, source: regex::Error },
    #[error("pattern table rule {0}: proof rules need a `proof` capture group")]
    MissingProofGroup(usize),
}

impl PatternTable {
    pub fn from_toml(text: &str) -> Result<Self, PatternError> {
        let raw: RawTable = toml::from_str(text)?;
        let mut rules = Vec::new();
        for (index, r) in raw.rule.into_iter().enumerate() {
            let regex = Regex::new(&r.regex).map_err(|source| PatternError::Regex { index, source })?;
            if r.verdict == RuleVerdict::Proof && !regex.capture_names().any(|n| n == Some("proof")) {
                return Err(PatternError::MissingProofGroup(index));
            }
            rules.push(Rule { verdict: r.verdict, kind: r.kind.unwrap_or(SyntaxErrorKind::Other), regex });
        }
        let location = Regex::new(r"\bline (\d+)").expect("static regex");
        Ok(PatternTable { rules, location })
    }

    /// The table shipped with the crate.
    pub fn builtin() -> &'static PatternTable {
        static T: OnceLock<PatternTable> = OnceLock::new();
        T.get_or_init(|| PatternTable::from_toml(DEFAULT_TABLE).expect("builtin pattern table"))
    }

    /// Classifies `raw` without reference to declared axioms; a proof verdict
    /// carries the proof line with an empty label set.
    pub fn classify(&self, raw: &str) -> ProverVerdict {
        if raw.trim().is_empty() {
            return ProverVerdict::NoProof { message: "empty output".into() };
        }
        for rule in &self.rules {
            let Some(caps) = rule.regex.captures(raw) else { continue };
            let line_of_match = || {
                let m = caps.get(0).expect("whole match");
                let start = raw[..m.start()].rfind('\n').map_or(0, |i| i + 1);
                let end = raw[m.end()..].find('\n').map_or(raw.len(), |i| m.end() + i);
                raw[start..end].trim().to_string()
            };
            return match rule.verdict {
                RuleVerdict::Syntax => ProverVerdict::SyntaxError {
                    kind: rule.kind,
                    message: line_of_match(),
                    location: self.location.captures(raw).and_then(|c| c[1].parse().ok()),
                },
                RuleVerdict::Proof => ProverVerdict::ProofFound {
                    outcome: ProofOutcome { proof_text: caps["proof"].trim().to_string(), ..ProofOutcome::default() },
                },
                RuleVerdict::Timeout => ProverVerdict::Timeout { stage: "prover".into() },
                RuleVerdict::NoProof => ProverVerdict::NoProof { message: line_of_match() },
            };
        }
        let first = raw.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or_default();
        ProverVerdict::NoProof { message: first.to_string() }
    }
}

/// [`PatternTable::classify`] with the builtin table.
pub fn classify_output(raw: &str) -> ProverVerdict {
    PatternTable::builtin().classify(raw)
}
