use std::sync::OnceLock;

use regex::Regex;

use super::{parse_proof_sketch, Axiom, Clause, TheoryDoc, TheoryError, TheoryPatch};
use crate::logic::{parse_formula, Formula};

struct Patterns {
    labelled: Regex,
    assumes: Regex,
    shows: Regex,
    comment_prefix: Regex,
    decl_entry: Regex,
}

fn patterns() -> &'static Patterns {
    static P: OnceLock<Patterns> = OnceLock::new();
    P.get_or_init(|| Patterns {
        labelled: Regex::new(r#"^(?:and\s+)?([A-Za-z][A-Za-z0-9_']*)\s*:\s*"([^"]*)"\s*(?:and)?$"#)
            .expect("static regex"),
        assumes: Regex::new(r#"^assumes\s+([A-Za-z][A-Za-z0-9_']*)\s*:\s*"([^"]*)"\s*(?:and)?$"#)
            .expect("static regex"),
        shows: Regex::new(r#"^shows\s+"([^"]*)"$"#).expect("static regex"),
        comment_prefix: Regex::new(r"^(?i:explanation\s*\d+|premise|hypothesis)\s*:\s*").expect("static regex"),
        decl_entry: Regex::new(r#"^[A-Za-z][A-Za-z0-9_']*\s*::"#).expect("static regex"),
    })
}

#[derive(PartialEq)]
enum Mode {
    Top,
    Consts,
    Axioms,
    Theorem,
}

/// Reads a theory in the layout produced by [`super::render_theory`], with or
/// without the `theory ... begin`/`end` wrapper. Several axioms may share
/// one `axiomatization where` block joined by `and`.
pub fn parse_theory(text: &str) -> Result<TheoryDoc, TheoryError> {
    let (doc, have_goal, last_line) = parse_layout(text)?;
    if !have_goal {
        return Err(TheoryError::Layout { line: last_line, message: "no shows clause".into() });
    }
    Ok(doc)
}

/// Reads a correction that may restate only some clauses, such as an
/// `axiomatization` block without a theorem.
pub fn parse_theory_patch(text: &str) -> Result<TheoryPatch, TheoryError> {
    let (doc, have_goal, _) = parse_layout(text)?;
    Ok(TheoryPatch {
        declarations: doc.declarations,
        axioms: doc.axioms,
        assumption: doc.assumption.map(|c| c.formula),
        goal: have_goal.then_some(doc.goal.formula),
    })
}

fn parse_layout(text: &str) -> Result<(TheoryDoc, bool, usize), TheoryError> {
    let p = patterns();
    let lines = logical_lines(text);
    let mut doc = TheoryDoc {
        name: String::new(),
        declarations: Vec::new(),
        axioms: Vec::new(),
        assumption: None,
        goal: Clause { comment: String::new(), formula: Formula::Truth },
        proof: None,
    };
    let mut have_goal = false;
    let mut mode = Mode::Top;
    let mut pending_comment: Option<String> = None;
    let mut idx = 0;
    while idx < lines.len() {
        let (line_no, ref raw) = lines[idx];
        idx += 1;
        let mut line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let layout = |message: &str| TheoryError::Layout { line: line_no, message: message.to_string() };

        if line.starts_with("(*") {
            let inner = line.trim_start_matches("(*").trim_end_matches("*)").trim();
            let inner = p.comment_prefix.replace(inner, "").trim().to_string();
            pending_comment = Some(match pending_comment.take() {
                Some(prev) => format!("{prev} {inner}"),
                None => inner,
            });
            continue;
        }
        if let Some(rest) = line.strip_prefix("theory ") {
            doc.name = rest.split_whitespace().next().unwrap_or_default().to_string();
            continue;
        }
        if line.starts_with("imports") || line == "begin" || line == "end" || line == "oops" {
            continue;
        }
        if line.starts_with("typedecl") {
            doc.declarations.push(line.to_string());
            mode = Mode::Top;
            continue;
        }
        if line.starts_with("consts") {
            doc.declarations.push(line.to_string());
            mode = Mode::Consts;
            continue;
        }
        if mode == Mode::Consts && p.decl_entry.is_match(line) {
            doc.declarations.push(format!("  {line}"));
            continue;
        }
        if let Some(rest) = line.strip_prefix("axiomatization") {
            mode = Mode::Axioms;
            line = rest.trim().trim_start_matches("where").trim();
            if line.is_empty() {
                continue;
            }
        }
        if line.starts_with("theorem") || line.starts_with("lemma") {
            mode = Mode::Theorem;
            continue;
        }
        if line.starts_with("proof") {
            let rest: Vec<&str> = lines[idx - 1..].iter().map(|(_, l)| l.as_str()).collect();
            doc.proof = Some(parse_proof_sketch(&rest.join("\n"))?);
            break;
        }
        match mode {
            Mode::Axioms => {
                let caps = p.labelled.captures(line).ok_or_else(|| layout("expected a labelled axiom"))?;
                let label = caps[1].to_string();
                let formula = formula(&label, &caps[2])?;
                let comment = pending_comment.take().unwrap_or_default();
                doc.axioms.push(Axiom { label, comment, formula });
            }
            Mode::Theorem => {
                if let Some(caps) =
                    p.assumes.captures(line).or_else(|| doc.assumption.as_ref().and_then(|_| p.labelled.captures(line)))
                {
                    let f = formula(&caps[1], &caps[2])?;
                    let comment = pending_comment.take().unwrap_or_default();
                    doc.assumption = Some(match doc.assumption.take() {
                        Some(prev) => Clause {
                            comment: join_comments(&prev.comment, &comment),
                            formula: Formula::and(prev.formula, f),
                        },
                        None => Clause { comment, formula: f },
                    });
                } else if let Some(caps) = p.shows.captures(line) {
                    doc.goal = Clause {
                        comment: pending_comment.take().unwrap_or_default(),
                        formula: formula("goal", &caps[1])?,
                    };
                    have_goal = true;
                } else if matches!(line, "sorry" | "sledgehammer" | "done") || line.starts_with("by ") {
                    continue;
                } else {
                    return Err(layout("expected assumes or shows"));
                }
            }
            Mode::Top | Mode::Consts => return Err(layout("unexpected line outside a block")),
        }
    }
    Ok((doc, have_goal, lines.last().map_or(1, |l| l.0)))
}

fn formula(label: &str, text: &str) -> Result<Formula, TheoryError> {
    parse_formula(text).map_err(|source| TheoryError::Formula { label: label.to_string(), source })
}

fn join_comments(a: &str, b: &str) -> String {
    match (a.is_empty(), b.is_empty()) {
        (true, _) => b.to_string(),
        (_, true) => a.to_string(),
        _ => format!("{a} {b}"),
    }
}

// Physical lines joined so that quoted strings and comments never span a
// line break. Each entry keeps its first line number (1-based).
fn logical_lines(text: &str) -> Vec<(usize, String)> {
    let mut out: Vec<(usize, String)> = Vec::new();
    let mut open: Option<(usize, String)> = None;
    for (i, line) in text.lines().enumerate() {
        match open.take() {
            Some((n, mut acc)) => {
                acc.push(' ');
                acc.push_str(line.trim());
                if balanced(&acc) {
                    out.push((n, acc));
                } else {
                    open = Some((n, acc));
                }
            }
            None if balanced(line) => out.push((i + 1, line.to_string())),
            None => open = Some((i + 1, line.to_string())),
        }
    }
    out.extend(open);
    out
}

fn balanced(s: &str) -> bool {
    s.matches('"').count().is_multiple_of(2) && s.matches("(*").count() <= s.matches("*)").count()
}
