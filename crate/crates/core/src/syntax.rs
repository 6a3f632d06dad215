//! ASCII surface syntax.
//!
//! ```text
//! F ::= F '->' F | F '|' F | F '&' F | '~' F | 'F' F | 'G' F | atom | '(' F ')'
//! ```
//!
//! Prefix operators bind tightest, then `&`, `|`, and finally `->`, which is
//! right-associative. `&` and `|` associate to the left. `X` is reserved: the
//! next-state operator exists only inside the tableau.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("empty formula")]
    Empty,
    #[error("unexpected character '{found}' at position {pos}")]
    BadChar { pos: usize, found: char },
    #[error("unexpected {found} at position {pos}, expected {expected}")]
    Unexpected { pos: usize, found: String, expected: &'static str },
    #[error("unexpected end of input, expected {expected}")]
    UnexpectedEnd { expected: &'static str },
    #[error("reserved operator 'X' at position {pos}: next-state is not part of the surface syntax")]
    ReservedNext { pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Arrow,
    Eventually,
    Always,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("atom '{name}'"),
            Tok::Not => "'~'".to_string(),
            Tok::And => "'&'".to_string(),
            Tok::Or => "'|'".to_string(),
            Tok::Arrow => "'->'".to_string(),
            Tok::Eventually => "'F'".to_string(),
            Tok::Always => "'G'".to_string(),
            Tok::LParen => "'('".to_string(),
            Tok::RParen => "')'".to_string(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'~' => out.push((start, Tok::Not)),
            b'&' => out.push((start, Tok::And)),
            b'|' => out.push((start, Tok::Or)),
            b'(' => out.push((start, Tok::LParen)),
            b')' => out.push((start, Tok::RParen)),
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((start, Tok::Arrow));
                i += 1;
            }
            c if c.is_ascii_alphabetic() => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                let word = &text[start..=i];
                let tok = match word {
                    "F" => Tok::Eventually,
                    "G" => Tok::Always,
                    "X" => return Err(ParseError::ReservedNext { pos: start }),
                    _ => Tok::Ident(word.to_string()),
                };
                out.push((start, tok));
            }
            _ => {
                let found = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::BadChar { pos: start, found });
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        const EXPECTED: &str = "a formula";
        match self.bump() {
            Some((_, Tok::Not)) => Ok(Formula::not(self.unary()?)),
            Some((_, Tok::Eventually)) => Ok(Formula::eventually(self.unary()?)),
            Some((_, Tok::Always)) => Ok(Formula::always(self.unary()?)),
            Some((_, Tok::Ident(name))) => Ok(Formula::Atom(name)),
            Some((_, Tok::LParen)) => {
                let inner = self.implication()?;
                match self.bump() {
                    Some((_, Tok::RParen)) => Ok(inner),
                    Some((pos, tok)) => Err(ParseError::Unexpected { pos, found: tok.describe(), expected: "')'" }),
                    None => Err(ParseError::UnexpectedEnd { expected: "')'" }),
                }
            }
            Some((pos, tok)) => Err(ParseError::Unexpected { pos, found: tok.describe(), expected: EXPECTED }),
            None => Err(ParseError::UnexpectedEnd { expected: EXPECTED }),
        }
    }
}

/// Parses the ASCII syntax into a [`Formula`].
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut parser = Parser { toks, at: 0 };
    let f = parser.implication()?;
    match parser.bump() {
        None => Ok(f),
        Some((pos, tok)) => Err(ParseError::Unexpected { pos, found: tok.describe(), expected: "end of input" }),
    }
}

/// Renders a formula so that [`parse`] reads it back to an equal tree.
///
/// Binary connectives are always parenthesized; prefix operators wrap any
/// non-atomic operand. `Next` renders as `X`, which `parse` rejects.
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

fn write_operand(f: &Formula, out: &mut String) {
    if let Formula::Atom(name) = f {
        out.push_str(name);
    } else if matches!(f, Formula::And(..) | Formula::Or(..) | Formula::Implies(..)) {
        write_formula(f, out);
    } else {
        out.push('(');
        write_formula(f, out);
        out.push(')');
    }
}

fn write_formula(f: &Formula, out: &mut String) {
    match f {
        Formula::Atom(name) => out.push_str(name),
        Formula::Not(inner) => {
            out.push('~');
            write_operand(inner, out);
        }
        Formula::Eventually(inner) => {
            out.push_str("F ");
            write_operand(inner, out);
        }
        Formula::Always(inner) => {
            out.push_str("G ");
            write_operand(inner, out);
        }
        Formula::Next(inner) => {
            out.push_str("X ");
            write_operand(inner, out);
        }
        Formula::And(l, r) => write_binary(l, " & ", r, out),
        Formula::Or(l, r) => write_binary(l, " | ", r, out),
        Formula::Implies(l, r) => write_binary(l, " -> ", r, out),
    }
}

fn write_binary(l: &Formula, op: &str, r: &Formula, out: &mut String) {
    out.push('(');
    write_formula(l, out);
    out.push_str(op);
    write_formula(r, out);
    out.push(')');
}

impl core::fmt::Display for Formula {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&render(self))
    }
}

impl core::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
