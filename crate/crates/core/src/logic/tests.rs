use super::*;
use proptest::prelude::*;

fn p(name: &str, vars: &[&str]) -> Formula {
    Formula::pred_vars(name, vars)
}

fn park_asm() -> Formula {
    Formula::conjoin([
        p("Man", &["x"]),
        p("Woman", &["y"]),
        p("ParkBench", &["z"]),
        p("Newlyweds", &["w"]),
        p("Sit", &["e"]),
        p("Agent", &["e", "x"]),
        p("Agent", &["e", "y"]),
        p("Patient", &["e", "z"]),
        p("Behind", &["w", "z"]),
    ])
}

#[test]
fn parses_event_semantics_block() {
    let f =
        parse_formula("∃x y z e. Father x ∧ Son y ∧ Ball z ∧ Kicked e ∧ Agent e x ∧ Agent e y ∧ Patient e z").unwrap();
    let body = Formula::conjoin([
        p("Father", &["x"]),
        p("Son", &["y"]),
        p("Ball", &["z"]),
        p("Kicked", &["e"]),
        p("Agent", &["e", "x"]),
        p("Agent", &["e", "y"]),
        p("Patient", &["e", "z"]),
    ]);
    assert_eq!(f, Formula::exists(["x", "y", "z", "e"], body));
}

#[test]
fn tupled_and_curried_application_agree() {
    let tupled = parse_formula(
        "∃x y z e. (Father(x) ∧ Son(y) ∧ Ball(z) ∧ Kicked(e) ∧ Agent(e, x) ∧ Agent(e, y) ∧ Patient(e, z))",
    )
    .unwrap();
    let curried =
        parse_formula("∃x y z e. Father x ∧ Son y ∧ Ball z ∧ Kicked e ∧ Agent e x ∧ Agent e y ∧ Patient e z").unwrap();
    assert_eq!(tupled, curried);
}

#[test]
fn parses_constants_and_hypothesis() {
    assert_eq!(parse_formula("False").unwrap(), Formula::Falsity);
    assert_eq!(
        parse_formula("∃x. People x ∧ Outside x").unwrap(),
        Formula::exists(["x"], Formula::and(p("People", &["x"]), p("Outside", &["x"])))
    );
}

#[test]
fn ascii_and_symbol_spellings() {
    let unicode = parse_formula("∀x. Man x ⟶ ¬Woman x ∨ People x").unwrap();
    let ascii = parse_formula("ALL x. Man x --> ~Woman x | People x").unwrap();
    let symbols = parse_formula("\\<forall>x. Man x \\<longrightarrow> \\<not>Woman x \\<or> People x").unwrap();
    assert_eq!(unicode, ascii);
    assert_eq!(unicode, symbols);
}

#[test]
fn precedence_and_associativity() {
    assert_eq!(
        parse_formula("A x ∧ B x ⟶ C x").unwrap(),
        Formula::implies(Formula::and(p("A", &["x"]), p("B", &["x"])), p("C", &["x"]))
    );
    assert_eq!(
        parse_formula("A x ⟶ B x ⟶ C x").unwrap(),
        Formula::implies(p("A", &["x"]), Formula::implies(p("B", &["x"]), p("C", &["x"])))
    );
    assert_eq!(
        parse_formula("A x ∨ B x ∧ C x").unwrap(),
        Formula::or(p("A", &["x"]), Formula::and(p("B", &["x"]), p("C", &["x"])))
    );
    assert_eq!(
        parse_formula("A x ⟷ B x ⟶ C x").unwrap(),
        Formula::iff(p("A", &["x"]), Formula::implies(p("B", &["x"]), p("C", &["x"])))
    );
    // quantifier bodies extend maximally right
    assert_eq!(
        parse_formula("A x ∧ ∃y. B y ∧ C y").unwrap(),
        Formula::and(p("A", &["x"]), Formula::exists(["y"], Formula::and(p("B", &["y"]), p("C", &["y"]))))
    );
}

#[test]
fn constants_are_uppercase_unbound_identifiers() {
    let f = parse_formula("At x Paris ∧ ∀Y. Q Y").unwrap();
    let expected = Formula::and(
        Formula::pred("At", vec![Term::var("x"), Term::constant("Paris")]),
        Formula::forall(["Y"], Formula::pred("Q", vec![Term::var("Y")])),
    );
    assert_eq!(f, expected);
}

#[test]
fn renders_minimal_forms() {
    assert_eq!(render_formula(&Formula::Falsity), "False");
    assert_eq!(render_formula(&Formula::exists(["x"], p("Boy", &["x"]))), "∃x. Boy x");
    assert_eq!(
        render_formula(&park_asm()),
        "Man x ∧ Woman y ∧ ParkBench z ∧ Newlyweds w ∧ Sit e ∧ Agent e x ∧ Agent e y ∧ Patient e z ∧ Behind w z"
    );
}

#[test]
fn renders_parentheses_only_where_needed() {
    let f = Formula::and(p("A", &["x"]), Formula::and(p("B", &["x"]), p("C", &["x"])));
    assert_eq!(render_formula(&f), "A x ∧ (B x ∧ C x)");
    let g = Formula::implies(Formula::implies(p("A", &["x"]), p("B", &["x"])), p("C", &["x"]));
    assert_eq!(render_formula(&g), "(A x ⟶ B x) ⟶ C x");
    let h = Formula::and(Formula::exists(["y"], p("B", &["y"])), p("C", &["x"]));
    assert_eq!(render_formula(&h), "(∃y. B y) ∧ C x");
    let n = Formula::not(Formula::and(p("A", &["x"]), p("B", &["x"])));
    assert_eq!(render_formula(&n), "¬(A x ∧ B x)");
}

#[test]
fn free_variable_order() {
    assert!(free_vars(&Formula::Falsity).is_empty());
    assert_eq!(free_vars(&park_asm()), vec!["x", "y", "z", "w", "e"]);
    let f = Formula::exists(["x"], p("At", &["x", "z"]));
    assert_eq!(free_vars(&f), vec!["z"]);
}

#[test]
fn errors_carry_spans() {
    let err = parse_formula("∃x y. Man x ∧").unwrap_err();
    assert_eq!(err.span.offset, 13);
    assert!(err.expected.contains("identifier"));

    let err = parse_formula("(Man x ∧ Woman y").unwrap_err();
    assert!(err.expected.contains("')'"));

    let err = parse_formula("∃x x. Man x").unwrap_err();
    assert!(err.message.contains("bound twice"));

    let err = parse_formula("Man x ∧ Raining").unwrap_err();
    assert!(err.expected.contains("argument"));

    let err = parse_formula("Man x # y").unwrap_err();
    assert_eq!(err.span, SourceSpan::new(6, 1));
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let var = prop::sample::select(vec!["x", "y", "z", "e", "w"]);
    let term = prop_oneof![
        4 => var.clone().prop_map(Term::var),
        1 => prop::sample::select(vec!["Paris", "Earth"]).prop_map(Term::constant),
    ];
    let pred_name = prop::sample::select(vec!["Man", "Agent", "ParkBench", "Sit", "At"]);
    let leaf = prop_oneof![
        8 => (pred_name, prop::collection::vec(term, 1..3))
            .prop_map(|(n, args)| Formula::pred(n, args)),
        1 => Just(Formula::Truth),
        1 => Just(Formula::Falsity),
    ];
    leaf.prop_recursive(5, 8, 2, move |inner| {
        let vars = prop::sample::subsequence(vec!["x", "y", "z", "e"], 1..3);
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::implies(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::iff(l, r)),
            (vars.clone(), inner.clone()).prop_map(|(v, b)| Formula::exists(v, b)),
            (vars, inner).prop_map(|(v, b)| Formula::forall(v, b)),
        ]
    })
}

proptest! {
    #[test]
    fn render_then_parse_is_identity(f in arb_formula()) {
        let text = render_formula(&f);
        prop_assert_eq!(parse_formula(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn parser_is_total(s in "[ -~∃∀¬∧∨⟶⟷]{0,40}") {
        match parse_formula(&s) {
            Ok(_) => {}
            Err(e) => prop_assert!(e.span.offset + e.span.length <= s.chars().count()),
        }
    }
}
