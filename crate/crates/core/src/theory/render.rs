use std::fmt::Write;

use super::{infer_declarations, TheoryDoc, ASSUMPTION_LABEL};
use crate::logic::render_formula;

/// Renders the theory body: axioms, theorem and proof, without the
/// `theory ... begin` wrapper.
pub fn render_theory(t: &TheoryDoc) -> String {
    let mut out = String::new();
    for line in &t.declarations {
        out.push_str(line);
        out.push('\n');
    }
    if !t.declarations.is_empty() {
        out.push('\n');
    }
    for (i, ax) in t.axioms.iter().enumerate() {
        let _ = writeln!(out, "(* Explanation {}: {} *)", i + 1, comment_text(&ax.comment));
        out.push_str("axiomatization where\n");
        let _ = writeln!(out, "  {}: \"{}\"", ax.label, render_formula(&ax.formula));
    }
    render_theorem(t, &mut out);
    if let Some(proof) = &t.proof {
        out.push_str(&proof.render());
    }
    out
}

fn render_theorem(t: &TheoryDoc, out: &mut String) {
    out.push_str("theorem hypothesis:\n");
    if let Some(asm) = &t.assumption {
        let _ = writeln!(out, "  (* Premise: {} *)", comment_text(&asm.comment));
        let _ = writeln!(out, "  assumes {ASSUMPTION_LABEL}: \"{}\"", render_formula(&asm.formula));
    }
    let _ = writeln!(out, "  (* Hypothesis: {} *)", comment_text(&t.goal.comment));
    let _ = writeln!(out, "  shows \"{}\"", render_formula(&t.goal.formula));
}

/// A complete `.thy` file. Declarations are inferred when the theory has none.
pub fn render_thy_file(t: &TheoryDoc) -> String {
    let mut doc = t.clone();
    if doc.declarations.is_empty() {
        doc.declarations = infer_declarations(t);
    }
    format!("theory {}\n  imports Main\nbegin\n\n{}\nend\n", t.name, render_theory(&doc))
}

/// A `.thy` file that runs the ATP search on the theorem's goal.
pub fn render_goal_probe(t: &TheoryDoc) -> String {
    let mut doc = t.clone();
    doc.proof = None;
    let file = render_thy_file(&doc);
    let body = file.strip_suffix("\nend\n").unwrap_or(&file);
    format!("{body}  sledgehammer\n  oops\n\nend\n")
}

// Keeps sentence text from closing the surrounding comment.
fn comment_text(s: &str) -> String {
    s.replace("*)", "* )").replace('\n', " ")
}

pub(super) fn comment_line(s: &str) -> String {
    format!("(* {} *)", comment_text(s))
}
