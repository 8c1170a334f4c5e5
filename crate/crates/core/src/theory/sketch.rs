use std::fmt::Write;

use super::render::comment_line;
use super::TheoryError;

pub const ATP_PLACEHOLDER: &str = "<ATP>";

/// Tactic text used when probing a single step with the ATP search.
pub(crate) const PROBE_TACTIC: &str = "sledgehammer sorry";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tactic {
    /// Literal proof method text such as `by blast`; may be empty when the
    /// statement needs no method.
    Named(String),
    AtpPlaceholder,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub comments: Vec<String>,
    pub statement: String,
    pub tactic: Tactic,
}

impl ProofStep {
    pub fn line(&self) -> String {
        match &self.tactic {
            Tactic::AtpPlaceholder => format!("{} {ATP_PLACEHOLDER}", self.statement),
            Tactic::Named(t) if t.is_empty() => self.statement.clone(),
            Tactic::Named(t) => format!("{} {t}", self.statement),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofSketch {
    pub steps: Vec<ProofStep>,
}

impl ProofSketch {
    /// `proof -` ... `qed` block with two-space indentation.
    pub fn render(&self) -> String {
        let mut out = String::from("proof -\n");
        for step in &self.steps {
            for c in &step.comments {
                let _ = writeln!(out, "  {}", comment_line(c));
            }
            let _ = writeln!(out, "  {}", step.line());
        }
        out.push_str("qed\n");
        out
    }

    pub fn placeholder_indices(&self) -> Vec<usize> {
        (0..self.steps.len()).filter(|&i| self.steps[i].tactic == Tactic::AtpPlaceholder).collect()
    }

    /// Copy in which step `index` runs the ATP search and every other
    /// placeholder is admitted.
    pub fn probe(&self, index: usize) -> Result<ProofSketch, TheoryError> {
        let len = self.steps.len();
        let target = self.steps.get(index).ok_or(TheoryError::IndexOutOfRange { index, len })?;
        if target.tactic != Tactic::AtpPlaceholder {
            return Err(TheoryError::NotAPlaceholder(index));
        }
        let mut out = self.clone();
        for (i, step) in out.steps.iter_mut().enumerate() {
            if i == index {
                step.tactic = Tactic::Named(PROBE_TACTIC.into());
            } else if step.tactic == Tactic::AtpPlaceholder {
                step.tactic = Tactic::Named("sorry".into());
            }
        }
        Ok(out)
    }
}

/// Replaces the placeholder of step `index` with `proof_line`.
pub fn substitute_atp(sketch: &ProofSketch, index: usize, proof_line: &str) -> Result<ProofSketch, TheoryError> {
    let len = sketch.steps.len();
    let step = sketch.steps.get(index).ok_or(TheoryError::IndexOutOfRange { index, len })?;
    if step.tactic != Tactic::AtpPlaceholder {
        return Err(TheoryError::NotAPlaceholder(index));
    }
    let mut out = sketch.clone();
    out.steps[index].tactic = Tactic::Named(proof_line.trim().to_string());
    Ok(out)
}

/// Extracts the outermost `proof -` ... `qed` block of `text`.
pub fn parse_proof_sketch(text: &str) -> Result<ProofSketch, TheoryError> {
    let lines: Vec<&str> = text.lines().collect();
    let start = lines
        .iter()
        .position(|l| {
            let t = l.trim();
            t == "proof -" || t == "proof" || t.starts_with("proof -")
        })
        .ok_or(TheoryError::EmptySketch)?;
    let end = lines.iter().rposition(|l| l.trim() == "qed").filter(|&e| e > start).unwrap_or(lines.len());
    let body = &lines[start + 1..end];

    let mut steps = Vec::new();
    let mut comments: Vec<String> = Vec::new();
    let mut i = 0;
    while i < body.len() {
        let mut chunk = body[i].trim().to_string();
        i += 1;
        if chunk.is_empty() {
            continue;
        }
        if chunk.starts_with("(*") {
            while !chunk.contains("*)") && i < body.len() {
                chunk.push(' ');
                chunk.push_str(body[i].trim());
                i += 1;
            }
            let inner = chunk.trim_start_matches("(*").trim_end_matches("*)").trim();
            comments.push(inner.split_whitespace().collect::<Vec<_>>().join(" "));
            continue;
        }
        while chunk.matches('"').count() % 2 == 1 && i < body.len() {
            chunk.push(' ');
            chunk.push_str(body[i].trim());
            i += 1;
        }
        let (statement, tactic) = split_tactic(&chunk);
        let dangling = matches!(steps.last(), Some(ProofStep { tactic: Tactic::Named(t), .. }) if t.is_empty());
        if statement.is_empty() && dangling && comments.is_empty() {
            steps.last_mut().expect("checked").tactic = tactic;
            continue;
        }
        steps.push(ProofStep { comments: std::mem::take(&mut comments), statement, tactic });
    }
    let last = steps.last().ok_or(TheoryError::EmptySketch)?;
    let discharges = last.statement.split_whitespace().any(|w| w == "show" || w == "thus");
    if !discharges {
        return Err(TheoryError::NoGoalDischarge);
    }
    Ok(ProofSketch { steps })
}

// Splits a step line into statement and tactic. The tactic starts at the
// first `by` outside quotes, or is a trailing `<ATP>`, `sorry`, `.` or `..`.
fn split_tactic(line: &str) -> (String, Tactic) {
    let mut in_quote = false;
    let mut word_start = None;
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    for (k, &(pos, c)) in chars.iter().enumerate() {
        if c == '"' {
            in_quote = !in_quote;
            word_start = None;
            continue;
        }
        if in_quote {
            continue;
        }
        if c.is_whitespace() {
            word_start = None;
            continue;
        }
        if word_start.is_none() {
            word_start = Some(pos);
            let rest = &line[pos..];
            let next = chars.get(k + 2).map(|&(_, ch)| ch);
            if rest.starts_with("by") && next.is_none_or(|ch| ch.is_whitespace() || ch == '(') {
                let statement = line[..pos].trim().to_string();
                let tactic = rest.trim();
                if tactic.trim_start_matches("by").trim() == ATP_PLACEHOLDER {
                    return (statement, Tactic::AtpPlaceholder);
                }
                return (statement, Tactic::Named(tactic.to_string()));
            }
        }
    }
    let trimmed = line.trim_end();
    for suffix in [ATP_PLACEHOLDER, "sorry", ".."] {
        if let Some(stmt) = trimmed.strip_suffix(suffix) {
            if suffix == ATP_PLACEHOLDER {
                return (stmt.trim().to_string(), Tactic::AtpPlaceholder);
            }
            if stmt.is_empty() || stmt.ends_with(char::is_whitespace) {
                return (stmt.trim().to_string(), Tactic::Named(suffix.to_string()));
            }
        }
    }
    if let Some(stmt) = trimmed.strip_suffix(" .") {
        return (stmt.trim().to_string(), Tactic::Named(".".into()));
    }
    (trimmed.to_string(), Tactic::Named(String::new()))
}
