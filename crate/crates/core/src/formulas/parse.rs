//! Parenthesized prefix syntax.
//!
//! ```text
//! formula := "(" head args ")"
//! head    := forall | exists | and | or | not | implies | = | <relation>
//! ```
//!
//! Variables are written `x0`, `x1`, ...; `and`/`or` take any number of
//! arguments, `(and)` being truth and `(or)` falsity.

use std::sync::Arc;

use thiserror::Error;

use super::syntax::{is_variable_token, Formula, Quant, Var, Vocabulary};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown relation symbol `{name}` at byte {pos}")]
    UnknownSymbol { name: String, pos: usize },
    #[error("relation `{name}` expects {expected} arguments, found {found} (byte {pos})")]
    ArityMismatch { name: String, expected: usize, found: usize, pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Open,
    Close,
    Word(&'a str),
}

fn tokenize(text: &str) -> Vec<(usize, Tok<'_>)> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'(' {
            out.push((i, Tok::Open));
            i += 1;
        } else if c == b')' {
            out.push((i, Tok::Close));
            i += 1;
        } else {
            let start = i;
            while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'(' && bytes[i] != b')' {
                i += 1;
            }
            out.push((start, Tok::Word(&text[start..i])));
        }
    }
    out
}

struct Parser<'a, 'v> {
    toks: Vec<(usize, Tok<'a>)>,
    pos: usize,
    end: usize,
    vocab: Option<&'v Vocabulary>,
    // arities seen so far when no vocabulary is supplied
    inferred: Vec<(String, usize)>,
}

impl<'a> Parser<'a, '_> {
    fn peek(&self) -> Option<&(usize, Tok<'a>)> {
        self.toks.get(self.pos)
    }

    fn syntax<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos, msg: msg.into() })
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some((_, Tok::Close)) => {
                self.pos += 1;
                Ok(())
            }
            Some((p, _)) => self.syntax(*p, "expected `)`"),
            None => self.syntax(self.end, "unexpected end of input, expected `)`"),
        }
    }

    fn var(&mut self) -> Result<Var, ParseError> {
        match self.peek() {
            Some(&(p, Tok::Word(w))) => {
                if is_variable_token(w) {
                    self.pos += 1;
                    w[1..]
                        .parse::<u32>()
                        .map(Var)
                        .or_else(|_| self.syntax(p, format!("variable index out of range: `{w}`")))
                } else {
                    self.syntax(p, format!("expected a variable, found `{w}`"))
                }
            }
            Some(&(p, _)) => self.syntax(p, "expected a variable"),
            None => self.syntax(self.end, "unexpected end of input, expected a variable"),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some((_, Tok::Open)) => self.pos += 1,
            Some(&(p, _)) => return self.syntax(p, "expected `(`"),
            None => return self.syntax(self.end, "unexpected end of input, expected `(`"),
        }
        let (head_pos, head) = match self.peek() {
            Some(&(p, Tok::Word(w))) => (p, w),
            Some(&(p, _)) => return self.syntax(p, "expected an operator or relation name"),
            None => return self.syntax(self.end, "unexpected end of input"),
        };
        self.pos += 1;
        let f = match head {
            "forall" | "exists" => {
                let q = if head == "forall" { Quant::Forall } else { Quant::Exists };
                let v = self.var()?;
                let body = self.formula()?;
                Formula::Quant(q, v, Box::new(body))
            }
            "not" => Formula::not(self.formula()?),
            "implies" => {
                let a = self.formula()?;
                let b = self.formula()?;
                Formula::implies(a, b)
            }
            "and" | "or" => {
                let mut parts = Vec::new();
                while let Some((_, Tok::Open)) = self.peek() {
                    parts.push(self.formula()?);
                }
                if head == "and" {
                    Formula::And(parts)
                } else {
                    Formula::Or(parts)
                }
            }
            "=" => {
                let a = self.var()?;
                let b = self.var()?;
                Formula::Eq(a, b)
            }
            name if is_variable_token(name) => {
                return self.syntax(head_pos, format!("variable `{name}` in operator position"))
            }
            name => {
                let mut args = Vec::new();
                while let Some((_, Tok::Word(_))) = self.peek() {
                    args.push(self.var()?);
                }
                self.check_atom(name, args.len(), head_pos)?;
                Formula::Atom { rel: Arc::from(name), args }
            }
        };
        self.expect_close()?;
        Ok(f)
    }

    fn check_atom(&mut self, name: &str, found: usize, pos: usize) -> Result<(), ParseError> {
        let expected = match self.vocab {
            Some(v) => match v.index_of(name) {
                Some(i) => v.arity(i),
                None => return Err(ParseError::UnknownSymbol { name: name.to_string(), pos }),
            },
            None => match self.inferred.iter().find(|(n, _)| n == name) {
                Some((_, a)) => *a,
                None => {
                    if found == 0 {
                        return self.syntax(pos, format!("relation `{name}` needs arguments"));
                    }
                    self.inferred.push((name.to_string(), found));
                    found
                }
            },
        };
        if expected != found {
            return Err(ParseError::ArityMismatch { name: name.to_string(), expected, found, pos });
        }
        Ok(())
    }
}

/// Parses a formula, checking every atom against `vocab`.
pub fn parse_formula(text: &str, vocab: &Vocabulary) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: tokenize(text), pos: 0, end: text.len(), vocab: Some(vocab), inferred: Vec::new() };
    let f = p.formula()?;
    if let Some(&(pos, _)) = p.peek() {
        return p.syntax(pos, "trailing input after formula");
    }
    Ok(f)
}

/// Parses a formula and infers the vocabulary from its atoms (arity of the
/// first occurrence; later occurrences must agree).
pub fn parse_with_inferred_vocabulary(text: &str) -> Result<(Formula, Vocabulary), ParseError> {
    let mut p = Parser { toks: tokenize(text), pos: 0, end: text.len(), vocab: None, inferred: Vec::new() };
    let f = p.formula()?;
    if let Some(&(pos, _)) = p.peek() {
        return p.syntax(pos, "trailing input after formula");
    }
    let vocab = Vocabulary::new(p.inferred).map_err(|e| ParseError::Syntax { pos: 0, msg: e.to_string() })?;
    Ok((f, vocab))
}
