use std::sync::OnceLock;

use regex::Regex;

use super::{LlmError, Stage};
use crate::prop::{parse_logical_information, PropositionalModel};
use crate::theory::{parse_proof_sketch, ProofSketch};

/// Role lines for one sentence of a syntactic parse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceParse {
    pub sentence: String,
    pub roles: Vec<(String, String)>,
}

/// Raw logical forms per sentence from an autoformalisation answer.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Formalisation {
    pub declarations: Vec<String>,
    pub premise: Option<String>,
    /// `(k, form)` for `Explanation k`, in answer order.
    pub explanations: Vec<(usize, String)>,
    pub hypothesis: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Answer {
    SyntacticParse(Vec<SentenceParse>),
    Formalisation(Formalisation),
    /// Corrected theory text.
    Theory(String),
    /// The quantifier critique found nothing to change.
    Unchanged,
    Logic(PropositionalModel),
    Sketch(ProofSketch),
    Explanations(Vec<String>),
}

/// Stage-specific extraction of an answer.
pub fn parse_refinement_answer(stage: Stage, response: &str) -> Result<Answer, LlmError> {
    let malformed = |reason: String| LlmError::MalformedAnswer { stage, reason };
    if response.trim().is_empty() {
        return Err(malformed("empty answer".into()));
    }
    match stage {
        Stage::SyntacticParse => parse_syntactic_parse(response).map(Answer::SyntacticParse),
        Stage::Autoformalise => parse_formalisation(response).map(Answer::Formalisation),
        Stage::QuantifierRefine if is_no_change(response) => Ok(Answer::Unchanged),
        Stage::QuantifierRefine | Stage::SyntaxRefine | Stage::ConsistencyRefine => {
            extract_code_block(response).map(Answer::Theory).ok_or_else(|| "no Isabelle code found".to_string())
        }
        Stage::ExtractLogic => parse_logic(response).map(Answer::Logic),
        Stage::ProofSketch => {
            parse_proof_sketch(&strip_fences(response)).map(Answer::Sketch).map_err(|e| e.to_string())
        }
        Stage::RefineExplanation => parse_explanation_list(response).map(Answer::Explanations),
    }
    .map_err(malformed)
}

fn strip_fences(text: &str) -> String {
    text.lines().filter(|l| !l.trim_start().starts_with("```")).collect::<Vec<_>>().join("\n")
}

fn is_no_change(response: &str) -> bool {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| {
        Regex::new(r"(?i)\bno (changes?|refinements?|corrections?)\b|quantifiers are (already )?correct")
            .expect("static regex")
    });
    extract_code_block(response).is_none() && re.is_match(response)
}

/// The theory text of an answer: the last fenced block that looks like
/// Isabelle code, or else everything from the first theory-like line.
pub fn extract_code_block(response: &str) -> Option<String> {
    let looks_like_theory = |s: &str| s.contains("axiomatization") || s.contains("theorem") || s.contains("shows");
    let mut blocks = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    for line in response.lines() {
        if line.trim_start().starts_with("```") {
            match current.take() {
                Some(lines) => blocks.push(lines.join("\n")),
                None => current = Some(Vec::new()),
            }
        } else if let Some(lines) = current.as_mut() {
            lines.push(line);
        }
    }
    if let Some(block) = blocks.into_iter().rev().find(|b| looks_like_theory(b)) {
        return Some(block.trim_end().to_string() + "\n");
    }
    let start = response.lines().position(|l| {
        let t = l.trim_start();
        t.starts_with("theory ") || t.starts_with("(*") || t.starts_with("axiomatization") || t.starts_with("typedecl")
    })?;
    let rest: Vec<&str> = response.lines().skip(start).collect();
    let text = rest.join("\n");
    looks_like_theory(&text).then(|| text.trim_end().to_string() + "\n")
}

fn parse_logic(response: &str) -> Result<PropositionalModel, String> {
    let text = strip_fences(response);
    let lower = text.to_lowercase();
    let start = lower.find("logical propositions:").ok_or("no \"Logical Propositions:\" section")?;
    parse_logical_information(&text[start..]).map_err(|e| e.to_string())
}

pub fn parse_syntactic_parse(response: &str) -> Result<Vec<SentenceParse>, String> {
    static RE: OnceLock<(Regex, Regex)> = OnceLock::new();
    let (header, role) = RE.get_or_init(|| {
        (
            Regex::new(r"^\s*(?:\d+[.)]\s*)(.+)$").expect("static regex"),
            Regex::new(r"^\s*-?\s*([A-Z][A-Za-z ]{1,40}):\s*(.*)$").expect("static regex"),
        )
    });
    let mut out: Vec<SentenceParse> = Vec::new();
    for line in response.lines() {
        if let Some(c) = header.captures(line) {
            out.push(SentenceParse { sentence: c[1].trim().to_string(), roles: Vec::new() });
        } else if let Some(c) = role.captures(line) {
            let name = c[1].trim();
            if name.ends_with("Sentence") || name == "Answer" {
                continue;
            }
            match out.last_mut() {
                Some(s) => s.roles.push((name.to_string(), c[2].trim().to_string())),
                None => return Err(format!("role line before any sentence: {line:?}")),
            }
        }
    }
    if out.is_empty() || out.iter().all(|s| s.roles.is_empty()) {
        return Err("no parsed sentences".into());
    }
    Ok(out)
}

pub fn parse_formalisation(response: &str) -> Result<Formalisation, String> {
    static RE: OnceLock<[Regex; 4]> = OnceLock::new();
    let [labelled, axiom, assumes, shows] = RE.get_or_init(|| {
        [
            Regex::new(r"(?i)^\s*[*#]*\s*(premise|explanation\s*(?:sentence\s*)?(\d+)|hypothesis)(?:\s+sentence)?\s*[*]*\s*:\s*(.+?)\s*$")
                .expect("static regex"),
            Regex::new(r#"^\s*(?:and\s+)?explanation_(\d+)\s*:\s*"([^"]*)""#).expect("static regex"),
            Regex::new(r#"^\s*assumes\s+\w+\s*:\s*"([^"]*)""#).expect("static regex"),
            Regex::new(r#"^\s*shows\s+"([^"]*)""#).expect("static regex"),
        ]
    });
    let unquote = |s: &str| s.trim().trim_matches('"').trim_matches('`').trim().to_string();
    let mut out = Formalisation::default();
    let mut hypothesis = None;
    for line in strip_fences(response).lines() {
        let t = line.trim();
        if t.starts_with("typedecl") || t.starts_with("consts") || is_const_decl(t) {
            out.declarations.push(line.trim_end().to_string());
            continue;
        }
        if let Some(c) = axiom.captures(line) {
            out.explanations.push((c[1].parse().map_err(|_| "bad explanation number")?, c[2].to_string()));
        } else if let Some(c) = assumes.captures(line) {
            out.premise = Some(c[1].to_string());
        } else if let Some(c) = shows.captures(line) {
            hypothesis = Some(c[1].to_string());
        } else if let Some(c) = labelled.captures(line) {
            let value = unquote(&c[3]);
            let kind = c[1].to_lowercase();
            if kind.starts_with("premise") {
                if !value.eq_ignore_ascii_case("none") {
                    out.premise = Some(value);
                }
            } else if kind.starts_with("hypothesis") {
                hypothesis = Some(value);
            } else {
                out.explanations.push((c[2].parse().map_err(|_| "bad explanation number")?, value));
            }
        }
    }
    out.hypothesis = hypothesis.ok_or("no hypothesis line")?;
    if out.explanations.is_empty() {
        return Err("no explanation lines".into());
    }
    Ok(out)
}

fn is_const_decl(t: &str) -> bool {
    t.split_once("::").is_some_and(|(name, ty)| {
        !name.trim().is_empty() && !name.trim().contains(char::is_whitespace) && ty.trim().starts_with('"')
    })
}

pub fn parse_explanation_list(response: &str) -> Result<Vec<String>, String> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| {
        Regex::new(r"(?i)^\s*(?:[-*]\s*)?(?:\d+[.)]|explanation(?:\s+sentence)?\s*\d+\s*:)\s*(.+?)\s*$")
            .expect("static regex")
    });
    let out: Vec<String> = response
        .lines()
        .filter_map(|l| re.captures(l).map(|c| c[1].trim_matches('"').trim().to_string()))
        .filter(|s| !s.is_empty())
        .collect();
    if out.is_empty() {
        return Err("no numbered explanation sentences".into());
    }
    Ok(out)
}
