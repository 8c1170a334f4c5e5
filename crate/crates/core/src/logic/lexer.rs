use super::ast::SourceSpan;
use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Exists,
    Forall,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    Comma,
    Dot,
    True,
    False,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> &'static str {
        match self {
            Tok::Ident(_) => "identifier",
            Tok::Exists => "'∃'",
            Tok::Forall => "'∀'",
            Tok::Not => "'¬'",
            Tok::And => "'∧'",
            Tok::Or => "'∨'",
            Tok::Implies => "'⟶'",
            Tok::Iff => "'⟷'",
            Tok::LParen => "'('",
            Tok::RParen => "')'",
            Tok::Comma => "','",
            Tok::Dot => "'.'",
            Tok::True => "'True'",
            Tok::False => "'False'",
            Tok::Eof => "end of input",
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

// Longest spellings first so that prefixes never shadow them.
const SPELLINGS: &[(&str, Tok)] = &[
    ("\\<longleftrightarrow>", Tok::Iff),
    ("\\<longrightarrow>", Tok::Implies),
    ("\\<exists>", Tok::Exists),
    ("\\<forall>", Tok::Forall),
    ("\\<and>", Tok::And),
    ("\\<not>", Tok::Not),
    ("\\<or>", Tok::Or),
    ("<->", Tok::Iff),
    ("-->", Tok::Implies),
    ("/\\", Tok::And),
    ("\\/", Tok::Or),
    ("∃", Tok::Exists),
    ("∀", Tok::Forall),
    ("¬", Tok::Not),
    ("∧", Tok::And),
    ("∨", Tok::Or),
    ("⟶", Tok::Implies),
    ("→", Tok::Implies),
    ("⟷", Tok::Iff),
    ("↔", Tok::Iff),
    ("~", Tok::Not),
    ("&", Tok::And),
    ("|", Tok::Or),
    ("(", Tok::LParen),
    (")", Tok::RParen),
    (",", Tok::Comma),
    (".", Tok::Dot),
];

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    'outer: while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match word.as_str() {
                "EX" => Tok::Exists,
                "ALL" => Tok::Forall,
                "True" => Tok::True,
                "False" => Tok::False,
                _ => Tok::Ident(word),
            };
            out.push(Token { tok, span: SourceSpan::new(start, i - start) });
            continue;
        }
        for (spelling, tok) in SPELLINGS {
            let len = spelling.chars().count();
            if i + len <= chars.len() && chars[i..i + len].iter().copied().eq(spelling.chars()) {
                out.push(Token { tok: tok.clone(), span: SourceSpan::new(i, len) });
                i += len;
                continue 'outer;
            }
        }
        return Err(ParseError::new(
            SourceSpan::new(i, 1),
            ["identifier", "connective", "quantifier", "'('"],
            format!("unexpected character {c:?}"),
        ));
    }
    out.push(Token { tok: Tok::Eof, span: SourceSpan::new(chars.len(), 0) });
    Ok(out)
}
