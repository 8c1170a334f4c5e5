use super::PropositionalModel;

pub(crate) const PROPOSITIONS_HEADER: &str = "Logical Propositions:";
pub(crate) const RELATIONS_HEADER: &str = "Logical Relations:";
pub(crate) const DERIVED_HEADER: &str = "Derived Implications:";

/// Three-section text block used in prompts; empty sections read `none`.
///
/// Each relation is listed twice: once over atom symbols and once with the
/// symbols replaced by their glosses.
pub fn format_logical_information(model: &PropositionalModel) -> String {
    let mut out = String::new();
    out.push_str(PROPOSITIONS_HEADER);
    out.push('\n');
    if model.atoms.is_empty() {
        out.push_str("none\n");
    }
    for atom in &model.atoms {
        out.push_str(&atom.symbol);
        out.push_str(": ");
        out.push_str(&atom.gloss);
        if let Some(n) = atom.source_sentence {
            out.push_str(&format!(" (from Explanatory Sentence {n})"));
        }
        out.push('\n');
    }

    out.push_str(RELATIONS_HEADER);
    out.push('\n');
    if model.relations.is_empty() {
        out.push_str("none\n");
    }
    let gloss = |s: &str| model.atom(s).map_or_else(|| s.to_owned(), |a| a.gloss.clone());
    for r in &model.relations {
        out.push_str(&r.to_string());
        out.push('\n');
        out.push_str(&r.render_with(&gloss));
        out.push('\n');
    }

    out.push_str(DERIVED_HEADER);
    out.push('\n');
    if model.derived.is_empty() {
        out.push_str("none\n");
    }
    for d in &model.derived {
        out.push_str(&d.to_string());
        out.push('\n');
    }
    out
}
