use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ProofOutcome {
    pub used_axiom_labels: BTreeSet<String>,
    /// The proof cites the premise (`asm` or `assms`).
    pub uses_assumption: bool,
    pub proof_text: String,
}

/// Declared labels that occur as standalone tokens in `proof_text`.
pub fn extract_used_axioms(proof_text: &str, declared: &[String]) -> ProofOutcome {
    let tokens: BTreeSet<&str> =
        proof_text.split(|c: char| !(c.is_alphanumeric() || c == '_' || c == '\'')).filter(|t| !t.is_empty()).collect();
    ProofOutcome {
        used_axiom_labels: declared.iter().filter(|l| tokens.contains(l.as_str())).cloned().collect(),
        uses_assumption: tokens.contains("asm") || tokens.contains("assms"),
        proof_text: proof_text.to_string(),
    }
}
