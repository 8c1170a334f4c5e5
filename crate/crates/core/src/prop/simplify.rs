use super::PropFormula;

/// Equivalence-preserving normalisation.
///
/// Removes double negations, applies identity and annihilator laws for
/// `True`/`False`, flattens nested `And`/`Or` and rewrites `Equivalent` into
/// a conjunction of implications in both directions.
pub fn simplify(f: &PropFormula) -> PropFormula {
    match f {
        PropFormula::Atom(_) | PropFormula::True | PropFormula::False => f.clone(),
        PropFormula::Not(a) => negate(simplify(a)),
        PropFormula::And(xs) => {
            let mut parts = Vec::new();
            for x in xs {
                match simplify(x) {
                    PropFormula::True => {}
                    PropFormula::False => return PropFormula::False,
                    PropFormula::And(inner) => push_unique(&mut parts, inner),
                    other => push_unique(&mut parts, vec![other]),
                }
            }
            collapse(parts, PropFormula::True, PropFormula::And)
        }
        PropFormula::Or(xs) => {
            let mut parts = Vec::new();
            for x in xs {
                match simplify(x) {
                    PropFormula::False => {}
                    PropFormula::True => return PropFormula::True,
                    PropFormula::Or(inner) => push_unique(&mut parts, inner),
                    other => push_unique(&mut parts, vec![other]),
                }
            }
            collapse(parts, PropFormula::False, PropFormula::Or)
        }
        PropFormula::Implies(a, b) => match (simplify(a), simplify(b)) {
            (PropFormula::True, b) => b,
            (PropFormula::False, _) | (_, PropFormula::True) => PropFormula::True,
            (a, PropFormula::False) => negate(a),
            (a, b) => PropFormula::implies(a, b),
        },
        PropFormula::Equivalent(xs) => {
            let xs: Vec<PropFormula> = xs.iter().map(simplify).collect();
            let mut parts = Vec::new();
            for pair in xs.windows(2) {
                parts.push(PropFormula::implies(pair[0].clone(), pair[1].clone()));
                parts.push(PropFormula::implies(pair[1].clone(), pair[0].clone()));
            }
            simplify(&PropFormula::And(parts))
        }
    }
}

fn negate(f: PropFormula) -> PropFormula {
    match f {
        PropFormula::Not(inner) => *inner,
        PropFormula::True => PropFormula::False,
        PropFormula::False => PropFormula::True,
        other => PropFormula::not(other),
    }
}

fn push_unique(parts: &mut Vec<PropFormula>, items: Vec<PropFormula>) {
    for item in items {
        if !parts.contains(&item) {
            parts.push(item);
        }
    }
}

fn collapse(mut parts: Vec<PropFormula>, unit: PropFormula, wrap: fn(Vec<PropFormula>) -> PropFormula) -> PropFormula {
    match parts.len() {
        0 => unit,
        1 => parts.remove(0),
        _ => wrap(parts),
    }
}
