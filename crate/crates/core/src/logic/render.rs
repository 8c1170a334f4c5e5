use super::ast::Formula;

const PREC_IFF: u8 = 1;
const PREC_IMPLIES: u8 = 2;
const PREC_OR: u8 = 3;
const PREC_AND: u8 = 4;
const PREC_NOT: u8 = 5;

/// Renders in the prover's notation: Unicode connectives, curried
/// application and the minimum parentheses needed to reparse to the same tree.
pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    write(f, 0, true, &mut out);
    out
}

fn write(f: &Formula, min_prec: u8, rightmost: bool, out: &mut String) {
    match f {
        Formula::Predicate { name, args } => {
            out.push_str(name);
            for a in args {
                out.push(' ');
                out.push_str(a.name());
            }
        }
        Formula::Truth => out.push_str("True"),
        Formula::Falsity => out.push_str("False"),
        Formula::Not(a) => {
            out.push('¬');
            write(a, PREC_NOT, rightmost, out);
        }
        Formula::And(l, r) => binary(l, r, "∧", PREC_AND, true, min_prec, rightmost, out),
        Formula::Or(l, r) => binary(l, r, "∨", PREC_OR, true, min_prec, rightmost, out),
        Formula::Implies(l, r) => binary(l, r, "⟶", PREC_IMPLIES, false, min_prec, rightmost, out),
        Formula::Iff(l, r) => binary(l, r, "⟷", PREC_IFF, false, min_prec, rightmost, out),
        Formula::Exists { vars, body } => quantifier("∃", vars, body, rightmost, out),
        Formula::Forall { vars, body } => quantifier("∀", vars, body, rightmost, out),
    }
}

#[allow(clippy::too_many_arguments)]
fn binary(
    l: &Formula,
    r: &Formula,
    op: &str,
    prec: u8,
    left_assoc: bool,
    min_prec: u8,
    rightmost: bool,
    out: &mut String,
) {
    let paren = prec < min_prec;
    if paren {
        out.push('(');
    }
    let (lmin, rmin) = if left_assoc { (prec, prec + 1) } else { (prec + 1, prec) };
    write(l, lmin, false, out);
    out.push(' ');
    out.push_str(op);
    out.push(' ');
    write(r, rmin, paren || rightmost, out);
    if paren {
        out.push(')');
    }
}

fn quantifier(sym: &str, vars: &[String], body: &Formula, rightmost: bool, out: &mut String) {
    // the body extends maximally right, so anything following needs parens
    let paren = !rightmost;
    if paren {
        out.push('(');
    }
    out.push_str(sym);
    out.push_str(&vars.join(" "));
    out.push_str(". ");
    write(body, 0, true, out);
    if paren {
        out.push(')');
    }
}
