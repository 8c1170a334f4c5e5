use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use super::{LlmError, Prompt, Stage};

const SLOT_OPEN: &str = "{{";
const SLOT_CLOSE: &str = "}}";

fn builtin_text(stage: Stage) -> &'static str {
    match stage {
        Stage::SyntacticParse => include_str!("../../templates/syntactic_parse.txt"),
        Stage::Autoformalise => include_str!("../../templates/autoformalise.txt"),
        Stage::QuantifierRefine => include_str!("../../templates/quantifier_refine.txt"),
        Stage::SyntaxRefine => include_str!("../../templates/syntax_refine.txt"),
        Stage::ConsistencyRefine => include_str!("../../templates/consistency_refine.txt"),
        Stage::ExtractLogic => include_str!("../../templates/extract_logic.txt"),
        Stage::ProofSketch => include_str!("../../templates/proof_sketch.txt"),
        Stage::RefineExplanation => include_str!("../../templates/refine_explanation.txt"),
    }
}

/// Slots each stage may use.
pub fn allowed_slots(stage: Stage) -> &'static [&'static str] {
    match stage {
        Stage::SyntacticParse => &["sentences"],
        Stage::Autoformalise => &["premise", "explanations", "hypothesis", "parsing"],
        Stage::QuantifierRefine => &["theory"],
        Stage::SyntaxRefine => &["theory", "error"],
        Stage::ConsistencyRefine => &["theory", "proof"],
        Stage::ExtractLogic => &["explanations"],
        Stage::ProofSketch => &["premise", "explanations", "hypothesis", "theory", "logic", "known", "goal"],
        Stage::RefineExplanation => &["premise", "explanations", "hypothesis", "theory", "feedback"],
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub stage: Stage,
    pub system: String,
    pub user: String,
    /// Appended to the user text when an answer has to be requested again.
    pub reminder: String,
    pub slots: BTreeSet<String>,
}

impl PromptTemplate {
    /// Parses a template file: `[system]`, `[user]` and `[reminder]`
    /// sections; `##` lines are dropped.
    pub fn parse(stage: Stage, text: &str) -> Result<Self, LlmError> {
        let bad = |reason: String| LlmError::Template { stage, reason };
        let mut sections: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        let mut current: Option<&str> = None;
        for line in text.lines() {
            if line.starts_with("##") {
                continue;
            }
            match line.trim() {
                "[system]" => current = Some("system"),
                "[user]" => current = Some("user"),
                "[reminder]" => current = Some("reminder"),
                _ => match current {
                    Some(s) => sections.entry(s).or_default().push(line),
                    None if line.trim().is_empty() => {}
                    None => return Err(bad(format!("text before the first section: {line:?}"))),
                },
            }
        }
        let take = |name: &str| sections.get(name).map(|l| l.join("\n").trim().to_string()).unwrap_or_default();
        let (system, user, reminder) = (take("system"), take("user"), take("reminder"));
        if user.is_empty() {
            return Err(bad("missing [user] section".into()));
        }
        let mut slots = BTreeSet::new();
        for part in [&system, &user, &reminder] {
            for name in slot_names(part).map_err(bad)? {
                if !allowed_slots(stage).contains(&name.as_str()) {
                    return Err(LlmError::UnknownSlot { stage, name });
                }
                slots.insert(name);
            }
        }
        Ok(PromptTemplate { stage, system, user, reminder, slots })
    }

    /// Fills every slot. Bindings must cover the template's slots and may
    /// only name slots the stage knows.
    pub fn render(&self, bindings: &BTreeMap<String, String>) -> Result<Prompt, LlmError> {
        for name in bindings.keys() {
            if !allowed_slots(self.stage).contains(&name.as_str()) {
                return Err(LlmError::UnknownSlot { stage: self.stage, name: name.clone() });
            }
        }
        if let Some(missing) = self.slots.iter().find(|s| !bindings.contains_key(*s)) {
            return Err(LlmError::MissingSlot { stage: self.stage, name: missing.clone() });
        }
        // Single pass, so slot markers inside bound text stay literal.
        let fill = |text: &str| {
            let mut out = String::new();
            let mut rest = text;
            while let Some(start) = rest.find(SLOT_OPEN) {
                let after = &rest[start + SLOT_OPEN.len()..];
                let end = after.find(SLOT_CLOSE).expect("slots validated at load");
                out.push_str(&rest[..start]);
                out.push_str(&bindings[after[..end].trim()]);
                rest = &after[end + SLOT_CLOSE.len()..];
            }
            out.push_str(rest);
            out
        };
        Ok(Prompt { stage: self.stage, system: fill(&self.system), user: fill(&self.user) })
    }
}

fn slot_names(text: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(start) = rest.find(SLOT_OPEN) {
        let after = &rest[start + SLOT_OPEN.len()..];
        let end = after.find(SLOT_CLOSE).ok_or_else(|| "unterminated slot".to_string())?;
        let name = after[..end].trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(format!("bad slot name {name:?}"));
        }
        out.push(name.to_string());
        rest = &after[end + SLOT_CLOSE.len()..];
    }
    Ok(out)
}

/// One template per stage.
#[derive(Debug, Clone)]
pub struct TemplateSet {
    templates: BTreeMap<Stage, PromptTemplate>,
}

impl TemplateSet {
    pub fn builtin() -> Self {
        let templates = Stage::ALL
            .iter()
            .map(|&s| (s, PromptTemplate::parse(s, builtin_text(s)).expect("builtin templates are valid")))
            .collect();
        TemplateSet { templates }
    }

    /// Loads `<stage>.txt` files from `dir`; stages without a file keep the
    /// builtin template.
    pub fn load_dir(dir: &Path) -> Result<Self, LlmError> {
        let mut set = Self::builtin();
        for &stage in Stage::ALL {
            let path = dir.join(format!("{}.txt", stage.name()));
            if path.exists() {
                let text = fs::read_to_string(&path)
                    .map_err(|e| LlmError::Template { stage, reason: format!("{}: {e}", path.display()) })?;
                set.templates.insert(stage, PromptTemplate::parse(stage, &text)?);
            }
        }
        Ok(set)
    }

    pub fn get(&self, stage: Stage) -> &PromptTemplate {
        &self.templates[&stage]
    }
}

impl Default for TemplateSet {
    fn default() -> Self {
        Self::builtin()
    }
}

/// Renders the template of `stage` from `templates`.
pub fn render_prompt(template: &PromptTemplate, bindings: &BTreeMap<String, String>) -> Result<Prompt, LlmError> {
    template.render(bindings)
}
