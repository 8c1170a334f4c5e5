use super::ast::{Formula, SourceSpan, Term};
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

/// Parses a logical form.
///
/// Precedence from tightest to loosest: `¬`, `∧`, `∨`, `⟶` (right
/// associative), `⟷` (right associative). A quantifier body extends as far
/// right as possible.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, bound: Vec::new() };
    let f = parser.iff()?;
    parser.expect_eof()?;
    Ok(f)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    bound: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn span(&self) -> SourceSpan {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let found = self.peek().describe();
        ParseError::new(self.span(), expected.iter().copied(), format!("found {found}"))
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(&["'∧'", "'∨'", "'⟶'", "'⟷'", "end of input"]))
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implies()?;
        if *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.iff()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Exists | Tok::Forall => self.quantifier(),
            Tok::True => {
                self.bump();
                Ok(Formula::Truth)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::Falsity)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.iff()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&["')'", "'∧'", "'∨'", "'⟶'", "'⟷'"]));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                self.application(name)
            }
            _ => Err(self.error(&["identifier", "'¬'", "'∃'", "'∀'", "'('", "'True'", "'False'"])),
        }
    }

    fn quantifier(&mut self) -> Result<Formula, ParseError> {
        let is_exists = self.bump().tok == Tok::Exists;
        let mut vars: Vec<String> = Vec::new();
        while let Tok::Ident(name) = self.peek().clone() {
            if vars.contains(&name) {
                return Err(ParseError::new(
                    self.span(),
                    ["distinct variable"],
                    format!("variable {name} bound twice in one quantifier"),
                ));
            }
            vars.push(name);
            self.bump();
        }
        if vars.is_empty() {
            return Err(self.error(&["variable"]));
        }
        if *self.peek() != Tok::Dot {
            return Err(self.error(&["'.'", "variable"]));
        }
        self.bump();
        let mark = self.bound.len();
        self.bound.extend(vars.iter().cloned());
        let body = self.iff();
        self.bound.truncate(mark);
        let body = body?;
        Ok(if is_exists { Formula::exists(vars, body) } else { Formula::forall(vars, body) })
    }

    fn application(&mut self, name: String) -> Result<Formula, ParseError> {
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            // tupled: P(a, b)
            self.bump();
            loop {
                match self.peek().clone() {
                    Tok::Ident(arg) => {
                        self.bump();
                        args.push(self.term(arg));
                    }
                    _ => return Err(self.error(&["argument"])),
                }
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => {
                        self.bump();
                        break;
                    }
                    _ => return Err(self.error(&["','", "')'"])),
                }
            }
        } else {
            // curried: P a b
            while let Tok::Ident(arg) = self.peek().clone() {
                self.bump();
                args.push(self.term(arg));
            }
            if args.is_empty() {
                return Err(self.error(&["argument", "'('"]));
            }
        }
        Ok(Formula::Predicate { name, args })
    }

    fn term(&self, name: String) -> Term {
        let lower = name.chars().next().is_some_and(|c| c.is_ascii_lowercase());
        if lower || self.bound.contains(&name) {
            Term::Var(name)
        } else {
            Term::Const(name)
        }
    }
}
