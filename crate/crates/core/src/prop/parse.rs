use std::sync::OnceLock;

use regex::Regex;

use super::format::{DERIVED_HEADER, PROPOSITIONS_HEADER, RELATIONS_HEADER};
use super::{PropAtom, PropError, PropFormula, PropositionalModel};

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Propositions,
    Relations,
    Derived,
}

/// Parses the two-section proposition/relation answer (a trailing
/// `Derived Implications:` section is accepted and ignored).
///
/// Atom keys are sanitised by replacing every non-alphanumeric character
/// with `_`. Relation lines may restate an earlier relation with glosses in
/// place of symbols; such echoes are resolved and deduplicated.
pub fn parse_logical_information(text: &str) -> Result<PropositionalModel, PropError> {
    let mut model = PropositionalModel::default();
    let mut section = Section::Preamble;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim().trim_matches('*').trim();
        if line.is_empty() {
            continue;
        }
        let (header, rest) = split_header(line);
        if let Some(next) = header {
            section = next;
            if rest.is_empty() {
                continue;
            }
        }
        let content = rest.trim();
        if content.eq_ignore_ascii_case("none") {
            continue;
        }
        match section {
            Section::Preamble => {
                return Err(PropError::Format {
                    line: line_no,
                    reason: format!("expected '{PROPOSITIONS_HEADER}' before {content:?}"),
                })
            }
            Section::Propositions => {
                let atom = parse_atom_line(content, line_no)?;
                if model.atom(&atom.symbol).is_some() {
                    return Err(PropError::DuplicateAtom { symbol: atom.symbol });
                }
                model.atoms.push(atom);
            }
            Section::Relations => {
                let relation = RelationParser::new(content, &model.atoms, line_no).parse()?;
                if !model.relations.contains(&relation) {
                    model.relations.push(relation);
                }
            }
            Section::Derived => {}
        }
    }
    Ok(model)
}

fn split_header(line: &str) -> (Option<Section>, &str) {
    let headers = [
        (PROPOSITIONS_HEADER, Section::Propositions),
        (RELATIONS_HEADER, Section::Relations),
        (DERIVED_HEADER, Section::Derived),
    ];
    for (h, s) in headers {
        if let Some(head) = line.get(..h.len()) {
            if head.eq_ignore_ascii_case(h) {
                return (Some(s), line[h.len()..].trim_start_matches('*').trim());
            }
        }
        let bare = &h[..h.len() - 1];
        if line.eq_ignore_ascii_case(bare) {
            return (Some(s), "");
        }
    }
    (None, line)
}

pub(crate) fn sanitize(key: &str) -> String {
    key.trim().chars().map(|c| if c.is_alphanumeric() { c } else { '_' }).collect()
}

fn parse_atom_line(line: &str, line_no: usize) -> Result<PropAtom, PropError> {
    static SOURCE: OnceLock<Regex> = OnceLock::new();
    let source =
        SOURCE.get_or_init(|| Regex::new(r"(?i)\s*\(from explanatory sentence\s+(\d+)\)\s*$").expect("static regex"));
    let Some((key, rest)) = line.split_once(':') else {
        return Err(PropError::Format { line: line_no, reason: format!("expected 'SYMBOL: gloss', found {line:?}") });
    };
    let symbol = sanitize(key);
    if symbol.is_empty() {
        return Err(PropError::Format { line: line_no, reason: "empty atom symbol".into() });
    }
    let (gloss, source_sentence) = match source.captures(rest) {
        Some(c) => {
            let whole = c.get(0).expect("group 0");
            (rest[..whole.start()].trim(), c[1].parse().ok())
        }
        None => (rest.trim(), None),
    };
    if gloss.is_empty() {
        return Err(PropError::Format { line: line_no, reason: format!("atom {symbol} has an empty gloss") });
    }
    Ok(PropAtom { symbol, gloss: gloss.to_owned(), source_sentence })
}

struct RelationParser<'a> {
    chars: Vec<char>,
    pos: usize,
    atoms: &'a [PropAtom],
    line: usize,
}

impl<'a> RelationParser<'a> {
    fn new(text: &str, atoms: &'a [PropAtom], line: usize) -> Self {
        Self { chars: text.chars().collect(), pos: 0, atoms, line }
    }

    fn fail(&self, reason: impl Into<String>) -> PropError {
        PropError::Format { line: self.line, reason: reason.into() }
    }

    fn parse(mut self) -> Result<PropFormula, PropError> {
        let f = self.expr()?;
        let rest: String = self.chars[self.pos..].iter().collect();
        let rest = rest.trim();
        // `Implies(A, B): A → B` annotations are ignored
        if !rest.is_empty() && !rest.starts_with(':') {
            return Err(self.fail(format!("unexpected trailing text {rest:?}")));
        }
        Ok(f)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn expr(&mut self) -> Result<PropFormula, PropError> {
        self.skip_ws();
        let start = self.pos;
        let mut name_end = start;
        while name_end < self.chars.len() && self.chars[name_end].is_ascii_alphabetic() {
            name_end += 1;
        }
        let name: String = self.chars[start..name_end].iter().collect();
        let is_op = matches!(name.as_str(), "Implies" | "Equivalent" | "Not" | "And" | "Or");
        if is_op && self.chars.get(name_end) == Some(&'(') {
            self.pos = name_end + 1;
            let mut args = vec![self.expr()?];
            loop {
                self.skip_ws();
                match self.chars.get(self.pos) {
                    Some(',') => {
                        self.pos += 1;
                        args.push(self.expr()?);
                    }
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.fail(format!("unclosed {name}("))),
                }
            }
            return self.build(&name, args);
        }
        self.leaf()
    }

    fn build(&self, name: &str, mut args: Vec<PropFormula>) -> Result<PropFormula, PropError> {
        let arity = args.len();
        let bad = |want: &str| self.fail(format!("{name} takes {want} argument(s), got {arity}"));
        Ok(match name {
            "Not" if arity == 1 => PropFormula::not(args.remove(0)),
            "Not" => return Err(bad("1")),
            "Implies" if arity == 2 => {
                let b = args.pop().expect("arity 2");
                let a = args.pop().expect("arity 2");
                PropFormula::implies(a, b)
            }
            "Implies" => return Err(bad("2")),
            "Equivalent" if arity >= 2 => PropFormula::Equivalent(args),
            "Equivalent" => return Err(bad("at least 2")),
            "And" => PropFormula::And(args),
            _ => PropFormula::Or(args),
        })
    }

    fn leaf(&mut self) -> Result<PropFormula, PropError> {
        let start = self.pos;
        while self.pos < self.chars.len() && !matches!(self.chars[self.pos], ',' | ')' | ':') {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        let text = text.trim();
        if text.is_empty() {
            return Err(self.fail("empty argument"));
        }
        match text {
            "True" => return Ok(PropFormula::True),
            "False" => return Ok(PropFormula::False),
            _ => {}
        }
        let symbol = sanitize(text);
        if self.atoms.iter().any(|a| a.symbol == symbol) {
            return Ok(PropFormula::Atom(symbol));
        }
        if let Some(a) = self.atoms.iter().find(|a| a.gloss.eq_ignore_ascii_case(text)) {
            return Ok(PropFormula::Atom(a.symbol.clone()));
        }
        Err(PropError::UndeclaredAtom { symbol: text.to_owned(), line: self.line })
    }
}
