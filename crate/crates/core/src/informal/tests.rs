use std::collections::BTreeSet;

use proptest::prelude::*;

use super::*;
use crate::logic::{parse_formula, Formula, Term};

fn inf(s: &str) -> String {
    informalise(&parse_formula(s).unwrap()).unwrap()
}

fn tokens(s: &str) -> Vec<String> {
    s.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()).map(str::to_string).collect()
}

const FORM_1: &str = "∃x y e. Boy(x) ∧ Building(y) ∧ Inside(e) ∧ Agent(e, x) ∧ Patient(e, y)";
const FORM_2: &str = "∃x y e. Boy(x) ∧ Building(y) ∧ Inside(e) ∧ Agent(e, x)";

#[test]
fn patient_contrast() {
    assert_eq!(inf(FORM_1), "boy inside building");
    assert_eq!(inf(FORM_2), "boy inside");
}

#[test]
fn entity_grouping() {
    assert_eq!(inf("Child x ∧ Blonde x"), "blonde child");
    assert_eq!(inf("Plastic y ∧ Small y"), "small plastic");
    assert_eq!(
        inf("∃x y e. Child x ∧ Blonde x ∧ Item y ∧ Plastic y ∧ Small y ∧ Puts e ∧ Agent e x ∧ Patient e y"),
        "blonde child puts small plastic item"
    );
}

#[test]
fn camel_case_split() {
    assert_eq!(split_camel("ParkBench"), "park bench");
    assert_eq!(split_camel("MoreThanOneTrophicLevel"), "more than one trophic level");
    assert_eq!(split_camel("XMLFile"), "xml file");
    assert_eq!(split_camel("living_thing"), "living thing");
    assert_eq!(split_camel("Inside"), "inside");
}

#[test]
fn park_bench_assumption() {
    let s =
        inf("Man x ∧ Woman y ∧ ParkBench z ∧ Newlyweds w ∧ Sit e ∧ Agent e x ∧ Agent e y ∧ Patient e z ∧ Behind w z");
    assert_eq!(s, "man and woman sit park bench, newlyweds behind park bench");
    assert_eq!(inf("∃x y z. Man x ∧ Woman y ∧ Park z ∧ At x z ∧ At y z"), "man at park, woman at park");
}

#[test]
fn connectives() {
    assert_eq!(inf("∀x. Deer x ⟶ Animal x"), "if deer, animal");
    assert_eq!(inf("∀x. Woodland x ⟷ Forest x"), "woodland if and only if forest");
    assert_eq!(inf("Die e ∧ Agent e x ∨ Leave e ∧ Agent e x"), "die or leave");
    assert_eq!(inf("¬Raining e"), "not raining");
    assert_eq!(inf("False"), "false");
    assert_eq!(
        inf("∀x e. Consumer x ⟶ (Feed e ∧ Agent e x ∧ Location e y ∧ TrophicLevel y)"),
        "if consumer, consumer feed at trophic level"
    );
}

#[test]
fn constants_and_modifiers() {
    assert_eq!(inf("City Paris ∧ Capital Paris"), "capital city");
    assert_eq!(inf("Visit e ∧ Agent e x ∧ Tourist x ∧ Patient e Paris"), "tourist visit paris");
    assert_eq!(inf("Run e ∧ Agent e x ∧ Dog x ∧ Towards e y ∧ Ball y"), "dog run towards ball");
}

#[test]
fn nested_quantifier_is_unsupported() {
    let f = parse_formula("Boy x ∧ (∃y. Building y)").unwrap();
    assert!(matches!(informalise(&f), Err(InformalError::UnsupportedShape(_))));
    let f = parse_formula("¬(∃x. Unicorn x)").unwrap();
    assert!(matches!(informalise(&f), Err(InformalError::UnsupportedShape(_))));
}

#[test]
fn analysis_types() {
    let (entities, frames) = analyse(&parse_formula(FORM_1).unwrap());
    assert_eq!(entities.len(), 2);
    assert_eq!(entities[0], EntityDescriptor { variable: "x".into(), attributes: vec!["Boy".into()] });
    assert_eq!(frames.len(), 1);
    assert_eq!(frames[0].verb, "inside");
    assert_eq!(frames[0].roles["Agent"], vec![Term::var("x")]);
}

#[test]
fn lexical_cosine_oracles() {
    let e = LexicalEmbedder;
    let sim = |a: &str, b: &str| cosine(&e.embed(a).unwrap(), &e.embed(b).unwrap());
    // "a a b" = (2, 1), "a b" = (1, 1): 3 / (√5 · √2)
    assert!((sim("a a b", "a b") - 3.0 / 10f64.sqrt()).abs() < 1e-12);
    assert_eq!(sim("", "a b"), 0.0);
    assert_eq!(sim("", ""), 0.0);
    assert!((sim("same words", "Same, words.") - 1.0).abs() < 1e-12);
    assert_eq!(sim("cat", "dog"), 0.0);
}

#[test]
fn faithfulness_of_patient_contrast() {
    let original = "The boy is inside of the building.";
    let one = faithfulness(original, &parse_formula(FORM_1).unwrap(), &LexicalEmbedder).unwrap();
    // original counts: the 2, boy, is, inside, of, building 1 each: |o| = 3.
    // "boy inside building": |i| = √3, overlap 3, so 3 / (3√3) = 1/√3.
    assert!((one.similarity - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    let two = faithfulness(original, &parse_formula(FORM_2).unwrap(), &LexicalEmbedder).unwrap();
    // "boy inside": overlap 2, |i| = √2, so 2 / (3√2).
    assert!((two.similarity - 2.0 / (3.0 * 2f64.sqrt())).abs() < 1e-12);
    assert!(two.similarity < one.similarity);
}

#[test]
fn dense_cosine() {
    let a = Embedding::Dense(vec![1.0, 0.0]);
    let b = Embedding::Dense(vec![1.0, 1.0]);
    assert!((cosine(&a, &b) - 1.0 / 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(cosine(&a, &Embedding::Dense(vec![1.0])), 0.0);
    assert_eq!(cosine(&a, &Embedding::Sparse(Default::default())), 0.0);
}

fn arb_frame() -> impl Strategy<Value = Vec<Formula>> {
    let nouns = prop::sample::select(vec!["Boy", "Girl", "Dog", "Ball", "Park", "Tall", "Red"]);
    let verbs = prop::sample::select(vec!["Run", "Kick", "Sit", "Inside"]);
    let roles = prop::sample::select(vec!["Agent", "Patient", "Theme", "Location", "Towards"]);
    let ents = prop::sample::select(vec!["x", "y", "z"]);
    let evs = prop::sample::select(vec!["e", "e1"]);
    (
        prop::collection::vec((nouns, ents.clone()), 1..6),
        prop::collection::vec((verbs, evs.clone()), 1..3),
        prop::collection::vec((roles, evs, ents.clone()), 0..5),
        prop::collection::vec((ents.clone(), ents), 0..2),
    )
        .prop_map(|(attrs, verbs, roles, rels)| {
            let mut out: Vec<Formula> = attrs.iter().map(|(n, v)| Formula::pred_vars(n, &[v])).collect();
            out.extend(verbs.iter().map(|(n, e)| Formula::pred_vars(n, &[e])));
            // every event referenced by a role keeps a verb
            for (r, e, x) in &roles {
                if !verbs.iter().any(|(_, v)| v == e) {
                    out.push(Formula::pred_vars("Move", &[e]));
                }
                out.push(Formula::pred_vars(r, &[e, x]));
            }
            out.extend(rels.iter().map(|(a, b)| Formula::pred_vars("Near", &[a, b])));
            out
        })
}

fn is_role(f: &Formula) -> bool {
    matches!(f, Formula::Predicate { name, .. } if crate::logic::EVENT_ROLES.contains(&name.as_str()) || name == "Towards")
}

proptest! {
    #[test]
    fn dropping_a_role_adds_no_tokens(parts in arb_frame(), pick in any::<prop::sample::Index>()) {
        let roles: Vec<usize> = (0..parts.len()).filter(|&i| is_role(&parts[i])).collect();
        prop_assume!(!roles.is_empty());
        let drop = roles[pick.index(roles.len())];
        let full = informalise(&Formula::conjoin(parts.clone())).unwrap();
        let mut fewer = parts.clone();
        fewer.remove(drop);
        let less = informalise(&Formula::conjoin(fewer)).unwrap();
        let full_tokens: BTreeSet<String> = tokens(&full).into_iter().collect();
        for t in tokens(&less) {
            prop_assert!(full_tokens.contains(&t), "{} added by dropping a role: {:?} vs {:?}", t, less, full);
        }
    }

    #[test]
    fn entity_order_across_variables_is_irrelevant(a in "[A-Z][a-z]{1,5}", b in "[A-Z][a-z]{1,5}", c in "[A-Z][a-z]{1,5}") {
        let one = Formula::conjoin(vec![
            Formula::pred_vars(&a, &["x"]), Formula::pred_vars(&b, &["x"]), Formula::pred_vars(&c, &["y"]),
            Formula::pred_vars("Near", &["x", "y"]),
        ]);
        let two = Formula::conjoin(vec![
            Formula::pred_vars(&c, &["y"]), Formula::pred_vars(&a, &["x"]), Formula::pred_vars(&b, &["x"]),
            Formula::pred_vars("Near", &["x", "y"]),
        ]);
        prop_assert_eq!(informalise(&one).unwrap(), informalise(&two).unwrap());
    }

    #[test]
    fn lexical_similarity_is_one_iff_counts_are_proportional(
        a in prop::collection::vec(prop::sample::select(vec!["a", "b", "A"]), 0..6).prop_map(|w| w.join(" ")),
        b in prop::collection::vec(prop::sample::select(vec!["a", "b", "B"]), 0..6).prop_map(|w| w.join(" ")),
    ) {
        let e = LexicalEmbedder;
        let sim = cosine(&e.embed(&a).unwrap(), &e.embed(&b).unwrap());
        let count = |s: &str, w: &str| tokens(s).iter().filter(|t| t.eq_ignore_ascii_case(w)).count();
        let (a1, a2, b1, b2) = (count(&a, "a"), count(&a, "b"), count(&b, "a"), count(&b, "b"));
        let proportional = a1 + a2 > 0 && b1 + b2 > 0 && a1 * b2 == a2 * b1;
        prop_assert_eq!(proportional, (sim - 1.0).abs() < 1e-9);
        if tokens(&a).is_empty() || tokens(&b).is_empty() {
            prop_assert_eq!(sim, 0.0);
        }
    }
}
