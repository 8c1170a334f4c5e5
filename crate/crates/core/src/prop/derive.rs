use super::eval::AtomIndex;
use super::{equivalent, simplify, Implication, Literal, PropError, PropFormula, PropositionalModel};

/// Populates `model.derived` with every literal implication `a → c` that
///
/// * is entailed by the conjunction of the relations,
/// * is not equivalent to any simplified relation (nor to either direction
///   of a relation stated as an equivalence), and
/// * is not valid on its own.
///
/// Literals come from the atoms occurring in the relations, ordered by atom
/// declaration with each positive literal before its negation. A model with
/// no relations is returned unchanged.
pub fn derive_implications(model: &PropositionalModel) -> Result<PropositionalModel, PropError> {
    let mut out = model.clone();
    out.derived.clear();
    if model.relations.is_empty() {
        return Ok(out);
    }

    let literals = literal_order(model);
    let atom_symbols: Vec<&str> = literals.iter().step_by(2).map(|l| l.atom.as_str()).collect();
    let index = AtomIndex::from_symbols(atom_symbols)?;

    // satisfying assignments of the relations, one bit per model
    let models: Vec<u32> = index.assignments().filter(|&a| model.relations.iter().all(|r| index.eval(r, a))).collect();
    let words = models.len().div_ceil(64);
    let truth_sets: Vec<Vec<u64>> = literals
        .iter()
        .map(|lit| {
            let f = lit.to_formula();
            let mut bits = vec![0u64; words];
            for (i, &m) in models.iter().enumerate() {
                if index.eval(&f, m) {
                    bits[i / 64] |= 1 << (i % 64);
                }
            }
            bits
        })
        .collect();

    let comparisons = novelty_set(&model.relations);

    for (i, antecedent) in literals.iter().enumerate() {
        for (j, consequent) in literals.iter().enumerate() {
            if i == j {
                continue;
            }
            // entailed iff no model makes the antecedent true and the consequent false
            let entailed = truth_sets[i]
                .iter()
                .zip(&truth_sets[j])
                .zip(full_mask(models.len()))
                .all(|((a, c), mask)| a & !c & mask == 0);
            if !entailed {
                continue;
            }
            let implication = Implication::new(antecedent.clone(), consequent.clone());
            let formula = implication.to_formula();
            if is_tautology(&formula)? {
                continue;
            }
            let mut novel = true;
            for c in &comparisons {
                if equivalent(&formula, c)? {
                    novel = false;
                    break;
                }
            }
            if novel {
                out.derived.push(implication);
            }
        }
    }
    Ok(out)
}

fn full_mask(n: usize) -> impl Iterator<Item = u64> {
    let words = n.div_ceil(64);
    (0..words).map(move |w| {
        let remaining = n - w * 64;
        if remaining >= 64 {
            u64::MAX
        } else {
            (1u64 << remaining) - 1
        }
    })
}

fn literal_order(model: &PropositionalModel) -> Vec<Literal> {
    let mut occurring: Vec<&str> = Vec::new();
    for r in &model.relations {
        r.collect_atoms(&mut occurring);
    }
    let mut ordered: Vec<&str> =
        model.atoms.iter().map(|a| a.symbol.as_str()).filter(|s| occurring.contains(s)).collect();
    for s in occurring {
        if !ordered.contains(&s) {
            ordered.push(s);
        }
    }
    ordered.into_iter().flat_map(|s| [Literal::pos(s), Literal::neg(s)]).collect()
}

/// Formulas a derived implication must not restate.
fn novelty_set(relations: &[PropFormula]) -> Vec<PropFormula> {
    let mut out = Vec::new();
    for r in relations {
        let s = simplify(r);
        if let (PropFormula::Equivalent(_), PropFormula::And(parts)) = (r, &s) {
            out.extend(parts.iter().cloned());
        }
        out.push(s);
    }
    out
}

fn is_tautology(f: &PropFormula) -> Result<bool, PropError> {
    super::entails(&[], f)
}
