use std::collections::{BTreeSet, HashMap};

use super::{ProverBackend, ProverError, ProverReply, ProverRequest, RequestKind};
use crate::logic::{parse_formula, Formula, Term};
use crate::prop::{entails, PropError, PropFormula};
use crate::theory::{parse_theory, TheoryDoc, TheoryError, ASSUMPTION_LABEL};

/// Offline prover that grounds a theory over its named individuals and
/// decides entailment by truth tables.
///
/// The domain is the theory's constants, the free variables of the
/// assumption and goal (treated as fixed individuals), and one anonymous
/// element. This is a finite-model approximation, exact for ground axioms
/// such as `P a` and `¬(P a)`, and meant for desk runs without a real prover.
/// Answers are phrased like the real prover's so they go through the
/// ordinary classifier.
#[derive(Debug, Default, Clone, Copy)]
pub struct GroundProver;

impl ProverBackend for GroundProver {
    fn submit(&mut self, request: &ProverRequest) -> Result<ProverReply, ProverError> {
        let doc = match parse_theory(&request.text) {
            Ok(doc) => doc,
            Err(TheoryError::Formula { label, source }) => {
                return Ok(ProverReply::raw(format!("Inner syntax error in {label}: {source}")))
            }
            Err(e) => return Ok(ProverReply::raw(format!("Outer syntax error: {e}"))),
        };
        let (premises, goal) = match request.kind {
            RequestKind::Theory => (Vec::new(), doc.goal.formula.clone()),
            RequestKind::Step(i) => match step_problem(&doc, i) {
                Some(p) => p,
                None => return Ok(ProverReply::raw("No proof found: unsupported step")),
            },
        };
        Ok(ProverReply::raw(match prove(&doc, &premises, &goal) {
            Ok(Some(cited)) => format!("Try this: using {} by blast", cited.join(" ")),
            Ok(None) => "No proof found".to_string(),
            Err(PropError::TooManyAtoms { count, .. }) => format!("No proof found: {count} ground atoms"),
            Err(e) => format!("No proof found: {e}"),
        }))
    }
}

// Earlier step statements become extra premises; `?thesis` is the goal.
fn step_problem(doc: &TheoryDoc, index: usize) -> Option<(Vec<Formula>, Formula)> {
    let steps = &doc.proof.as_ref()?.steps;
    let quoted = |s: &str| -> Option<Formula> {
        let start = s.find('"')?;
        let end = s[start + 1..].find('"')? + start + 1;
        parse_formula(&s[start + 1..end]).ok()
    };
    let earlier = steps[..index].iter().filter_map(|s| quoted(&s.statement)).collect();
    let statement = &steps.get(index)?.statement;
    let goal = if statement.contains("?thesis") { doc.goal.formula.clone() } else { quoted(statement)? };
    Some((earlier, goal))
}

fn prove(doc: &TheoryDoc, extra: &[Formula], goal: &Formula) -> Result<Option<Vec<String>>, PropError> {
    let mut fixed: Vec<String> = Vec::new();
    for f in doc.assumption.iter().map(|c| &c.formula).chain(extra).chain(std::iter::once(goal)) {
        for v in f.free_vars() {
            if !fixed.contains(&v) {
                fixed.push(v);
            }
        }
    }
    let mut domain: BTreeSet<String> = fixed.iter().cloned().collect();
    let all = doc.axioms.iter().map(|a| &a.formula).chain(doc.assumption.iter().map(|c| &c.formula)).chain(extra);
    for f in all.chain(std::iter::once(goal)) {
        f.visit_predicates(&mut |_, args| {
            for a in args {
                if let Term::Const(c) = a {
                    domain.insert(c.clone());
                }
            }
        });
    }
    domain.insert("_d0".to_string());
    let domain: Vec<String> = domain.into_iter().collect();

    // Axioms are closed universally over their free variables.
    let axioms: Vec<(String, PropFormula)> = doc
        .axioms
        .iter()
        .map(|a| {
            let closed = match a.formula.free_vars() {
                vars if vars.is_empty() => a.formula.clone(),
                vars => Formula::forall(vars, a.formula.clone()),
            };
            (a.label.clone(), ground(&closed, &HashMap::new(), &domain))
        })
        .collect();
    let mut base: Vec<PropFormula> = extra.iter().map(|f| ground(f, &HashMap::new(), &domain)).collect();
    let asm = doc.assumption.as_ref().map(|c| ground(&c.formula, &HashMap::new(), &domain));
    base.extend(asm.iter().cloned());
    let target = ground(goal, &HashMap::new(), &domain);

    let holds = |chosen: &[&(String, PropFormula)]| -> Result<bool, PropError> {
        let mut premises = base.clone();
        premises.extend(chosen.iter().map(|(_, f)| f.clone()));
        entails(&premises, &target)
    };
    let mut chosen: Vec<&(String, PropFormula)> = axioms.iter().collect();
    if !holds(&chosen)? {
        return Ok(None);
    }
    let mut i = 0;
    while i < chosen.len() {
        let mut fewer = chosen.clone();
        fewer.remove(i);
        if holds(&fewer)? {
            chosen = fewer;
        } else {
            i += 1;
        }
    }
    let mut cited: Vec<String> = Vec::new();
    if asm.is_some() {
        cited.push(ASSUMPTION_LABEL.to_string());
    }
    cited.extend(chosen.iter().map(|(l, _)| l.clone()));
    Ok(Some(cited))
}

fn ground(f: &Formula, env: &HashMap<String, String>, domain: &[String]) -> PropFormula {
    let g = |x: &Formula| ground(x, env, domain);
    match f {
        Formula::Predicate { name, args } => {
            let args: Vec<&str> = args
                .iter()
                .map(|a| match a {
                    Term::Var(v) => env.get(v).map_or(v.as_str(), String::as_str),
                    Term::Const(c) => c.as_str(),
                })
                .collect();
            PropFormula::atom(format!("{name}({})", args.join(",")))
        }
        Formula::Not(x) => PropFormula::not(g(x)),
        Formula::And(l, r) => PropFormula::And(vec![g(l), g(r)]),
        Formula::Or(l, r) => PropFormula::Or(vec![g(l), g(r)]),
        Formula::Implies(l, r) => PropFormula::implies(g(l), g(r)),
        Formula::Iff(l, r) => PropFormula::equivalent(g(l), g(r)),
        Formula::Exists { vars, body } => PropFormula::Or(instances(vars, body, env, domain)),
        Formula::Forall { vars, body } => PropFormula::And(instances(vars, body, env, domain)),
        Formula::Truth => PropFormula::True,
        Formula::Falsity => PropFormula::False,
    }
}

fn instances(vars: &[String], body: &Formula, env: &HashMap<String, String>, domain: &[String]) -> Vec<PropFormula> {
    let Some((first, rest)) = vars.split_first() else {
        return vec![ground(body, env, domain)];
    };
    let mut out = Vec::new();
    for d in domain {
        let mut inner = env.clone();
        inner.insert(first.clone(), d.clone());
        out.extend(instances(rest, body, &inner, domain));
    }
    out
}
