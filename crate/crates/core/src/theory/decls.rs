use std::collections::{BTreeMap, BTreeSet};

use super::TheoryDoc;
use crate::logic::{event_vars, Formula, Term};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sort {
    Entity,
    Event,
}

impl Sort {
    fn name(self) -> &'static str {
        match self {
            Sort::Entity => "entity",
            Sort::Event => "event",
        }
    }
}

/// Type declarations for every predicate and constant, with argument sorts
/// taken from the first occurrence.
pub fn infer_declarations(t: &TheoryDoc) -> Vec<String> {
    let mut preds: BTreeMap<String, Vec<Sort>> = BTreeMap::new();
    let mut consts: BTreeSet<String> = BTreeSet::new();
    let mut order: Vec<String> = Vec::new();
    let formulas = t
        .axioms
        .iter()
        .map(|a| &a.formula)
        .chain(t.assumption.iter().map(|c| &c.formula))
        .chain(std::iter::once(&t.goal.formula));
    for f in formulas {
        collect(f, &mut preds, &mut consts, &mut order);
    }
    let mut out = vec!["typedecl entity".to_string(), "typedecl event".to_string(), String::new()];
    if preds.is_empty() && consts.is_empty() {
        out.pop();
        return out;
    }
    out.push("consts".to_string());
    for name in &order {
        if let Some(sorts) = preds.get(name) {
            let mut ty: Vec<&str> = sorts.iter().map(|s| s.name()).collect();
            ty.push("bool");
            out.push(format!("  {name} :: \"{}\"", ty.join(" ⇒ ")));
        } else {
            out.push(format!("  {name} :: \"entity\""));
        }
    }
    out
}

fn collect(
    f: &Formula,
    preds: &mut BTreeMap<String, Vec<Sort>>,
    consts: &mut BTreeSet<String>,
    order: &mut Vec<String>,
) {
    let events = event_vars(f);
    f.visit_predicates(&mut |name, args| {
        if !preds.contains_key(name) && !consts.contains(name) {
            let sorts = args
                .iter()
                .map(|a| match a {
                    Term::Var(v) if events.contains(v) => Sort::Event,
                    _ => Sort::Entity,
                })
                .collect();
            preds.insert(name.to_string(), sorts);
            order.push(name.to_string());
        }
        for a in args {
            if let Term::Const(c) = a {
                if !preds.contains_key(c) && !consts.contains(c) {
                    consts.insert(c.clone());
                    order.push(c.clone());
                }
            }
        }
    });
}
