use std::collections::{BTreeMap, BTreeSet};

use super::InformalError;
use crate::logic::{event_vars, render_formula, Formula, Term};

/// Attributes of one entity in encounter order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityDescriptor {
    pub variable: String,
    pub attributes: Vec<String>,
}

impl EntityDescriptor {
    /// The last attribute read right to left is the head noun:
    /// `Child x ∧ Blonde x` gives "blonde child".
    pub fn phrase(&self) -> String {
        self.attributes.iter().rev().map(|a| split_camel(a)).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventFrame {
    pub event_var: String,
    /// Unary predicates on the event, joined.
    pub verb: String,
    /// Role or modifier name to fillers, in encounter order per role.
    pub roles: BTreeMap<String, Vec<Term>>,
}

/// Splits `ParkBench` into "park bench"; underscores become spaces.
pub fn split_camel(name: &str) -> String {
    let chars: Vec<char> = name.chars().collect();
    let mut out = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c == '_' {
            if !out.ends_with(' ') && !out.is_empty() {
                out.push(' ');
            }
            continue;
        }
        if i > 0 && c.is_uppercase() {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            if (prev.is_lowercase() || prev.is_ascii_digit() || (prev.is_uppercase() && next_lower))
                && !out.ends_with(' ')
            {
                out.push(' ');
            }
        }
        out.extend(c.to_lowercase());
    }
    out.trim().to_string()
}

/// Renders `f` as a plain English phrase.
///
/// Quantifiers are dropped. Within a conjunction, attributes are grouped per
/// entity, events become "agents verb patients" clauses, and other binary
/// predicates become "x relation y". When a conjunction has events, entities
/// that take part in no event or relation are left out. Implications render
/// as "if A, B".
pub fn informalise(f: &Formula) -> Result<String, InformalError> {
    let ctx = Ctx { events: event_vars(f), globals: entity_attributes(f, &event_vars(f)) };
    ctx.sentence(f)
}

struct Ctx {
    events: BTreeSet<String>,
    globals: BTreeMap<String, Vec<String>>,
}

fn strip_quantifiers(mut f: &Formula) -> &Formula {
    while let Formula::Exists { body, .. } | Formula::Forall { body, .. } = f {
        f = body;
    }
    f
}

fn unsupported(f: &Formula) -> InformalError {
    InformalError::UnsupportedShape(render_formula(f))
}

impl Ctx {
    fn is_event(&self, t: &Term) -> bool {
        matches!(t, Term::Var(v) if self.events.contains(v))
    }

    fn sentence(&self, f: &Formula) -> Result<String, InformalError> {
        match strip_quantifiers(f) {
            Formula::Implies(l, r) => Ok(format!("if {}, {}", self.sentence(l)?, self.sentence(r)?)),
            Formula::Iff(l, r) => Ok(format!("{} if and only if {}", self.sentence(l)?, self.sentence(r)?)),
            body => self.clause(body),
        }
    }

    fn clause(&self, f: &Formula) -> Result<String, InformalError> {
        match f {
            Formula::Exists { .. } | Formula::Forall { .. } => Err(unsupported(f)),
            Formula::Or(l, r) => Ok(format!("{} or {}", self.clause(l)?, self.clause(r)?)),
            Formula::Not(g) => Ok(format!("not {}", self.clause(g)?)),
            Formula::Implies(l, r) => Ok(format!("if {}, {}", self.clause(l)?, self.clause(r)?)),
            Formula::Iff(l, r) => Ok(format!("{} if and only if {}", self.clause(l)?, self.clause(r)?)),
            Formula::Truth => Ok("true".into()),
            Formula::Falsity => Ok("false".into()),
            Formula::Predicate { .. } | Formula::And(..) => self.conjunction(&f.conjuncts()),
        }
    }

    fn conjunction(&self, parts: &[&Formula]) -> Result<String, InformalError> {
        let atoms: Vec<(&str, &[Term])> = parts
            .iter()
            .filter_map(|p| match p {
                Formula::Predicate { name, args } => Some((name.as_str(), args.as_slice())),
                _ => None,
            })
            .collect();
        let local = attributes_of(atoms.iter().copied(), &self.events);
        let phrase = |t: &Term| -> String {
            let attrs = local.get(t.name()).or_else(|| self.globals.get(t.name()));
            match (attrs, t) {
                (Some(a), _) if !a.is_empty() => {
                    EntityDescriptor { variable: t.name().into(), attributes: a.clone() }.phrase()
                }
                (_, Term::Const(c)) => split_camel(c),
                _ => String::new(),
            }
        };

        let frames = frames_of(atoms.iter().copied(), &self.events);
        let mut attached: BTreeSet<&str> = BTreeSet::new();
        let mut rendered = Vec::new();
        for frame in &frames {
            for fillers in frame.roles.values() {
                attached.extend(fillers.iter().map(Term::name));
            }
            rendered.push(render_frame(frame, &phrase));
        }
        for (name, args) in &atoms {
            if args.len() >= 2 && !self.is_event(&args[0]) {
                attached.extend(args.iter().map(Term::name));
                let mut words = vec![phrase(&args[0]), split_camel(name)];
                words.extend(args[1..].iter().map(&phrase));
                rendered.push(join_words(&words));
            }
        }
        if frames.is_empty() {
            let mut seen = BTreeSet::new();
            for (_, args) in &atoms {
                if let [t] = args {
                    if !attached.contains(t.name()) && seen.insert(t.name()) {
                        rendered.push(phrase(t));
                    }
                }
            }
        }
        for p in parts {
            if !matches!(p, Formula::Predicate { .. } | Formula::Truth) {
                rendered.push(self.clause(p)?);
            }
        }
        rendered.retain(|s| !s.is_empty());
        Ok(rendered.join(", "))
    }
}

fn join_words(words: &[String]) -> String {
    words.iter().filter(|w| !w.is_empty()).cloned().collect::<Vec<_>>().join(" ")
}

fn render_frame(frame: &EventFrame, phrase: &dyn Fn(&Term) -> String) -> String {
    let fillers = |role: &str| -> String {
        let names: Vec<String> = frame
            .roles
            .get(role)
            .map(|ts| ts.iter().map(phrase).filter(|p| !p.is_empty()).collect())
            .unwrap_or_default();
        names.join(" and ")
    };
    let mut words = vec![fillers("Agent"), frame.verb.clone(), fillers("Patient"), fillers("Theme")];
    let location = fillers("Location");
    if !location.is_empty() {
        words.push(format!("at {location}"));
    }
    for role in frame.roles.keys() {
        if !matches!(role.as_str(), "Agent" | "Patient" | "Theme" | "Location") {
            let f = fillers(role);
            if !f.is_empty() {
                words.push(format!("{} {f}", split_camel(role)));
            }
        }
    }
    join_words(&words)
}

fn attributes_of<'a>(
    atoms: impl Iterator<Item = (&'a str, &'a [Term])>,
    events: &BTreeSet<String>,
) -> BTreeMap<String, Vec<String>> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (name, args) in atoms {
        if let [t] = args {
            if !matches!(t, Term::Var(v) if events.contains(v)) {
                let attrs = out.entry(t.name().to_string()).or_default();
                if !attrs.iter().any(|a| a == name) {
                    attrs.push(name.to_string());
                }
            }
        }
    }
    out
}

fn frames_of<'a>(atoms: impl Iterator<Item = (&'a str, &'a [Term])>, events: &BTreeSet<String>) -> Vec<EventFrame> {
    let mut frames: Vec<EventFrame> = Vec::new();
    for (name, args) in atoms {
        let Some(Term::Var(e)) = args.first() else { continue };
        if !events.contains(e) {
            continue;
        }
        let idx = match frames.iter().position(|f| &f.event_var == e) {
            Some(i) => i,
            None => {
                frames.push(EventFrame { event_var: e.clone(), verb: String::new(), roles: BTreeMap::new() });
                frames.len() - 1
            }
        };
        let frame = &mut frames[idx];
        if args.len() == 1 {
            if !frame.verb.is_empty() {
                frame.verb.push(' ');
            }
            frame.verb.push_str(&split_camel(name));
        } else {
            frame.roles.entry(name.to_string()).or_default().extend(args[1..].iter().cloned());
        }
    }
    frames
}

fn entity_attributes(f: &Formula, events: &BTreeSet<String>) -> BTreeMap<String, Vec<String>> {
    let mut atoms = Vec::new();
    f.visit_predicates(&mut |name, args| atoms.push((name, args)));
    attributes_of(atoms.into_iter(), events)
}

/// Entity descriptors and event frames over every predicate in `f`.
pub fn analyse(f: &Formula) -> (Vec<EntityDescriptor>, Vec<EventFrame>) {
    let events = event_vars(f);
    let mut atoms = Vec::new();
    f.visit_predicates(&mut |name, args| atoms.push((name, args)));
    let entities = attributes_of(atoms.iter().copied(), &events)
        .into_iter()
        .map(|(variable, attributes)| EntityDescriptor { variable, attributes })
        .collect();
    (entities, frames_of(atoms.into_iter(), &events))
}
