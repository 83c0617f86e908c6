//! Reader for the textual polynomial syntax, e.g. `3*x^2*y - 1/2`.
//!
//! ```text
//! expr    := ['+'|'-'] term (('+'|'-') term)*
//! term    := power (('*'|'/') power | power)*      juxtaposition multiplies: `2a`, `3(x+1)`
//! power   := atom ('^' integer)?
//! atom    := number | ident | '(' expr ')' | '-' power
//! number  := digits ('.' digits)?
//! ident   := [a-zA-Z][a-zA-Z0-9_]*
//! ```
//!
//! Division is only defined by nonzero constants.

use super::polynomial::Polynomial;
use super::rational::Rational;
use super::var::VarId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("unexpected character `{ch}` at position {pos}")]
    UnknownCharacter { ch: char, pos: usize },
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    EqEq,
    AndAnd,
}

pub(crate) fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' | '\u{2212}' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '/' => out.push((start, Tok::Slash)),
            '^' => out.push((start, Tok::Caret)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            '=' => {
                if bytes.get(i + 1) == Some(&'=') {
                    out.push((start, Tok::EqEq));
                    i += 1;
                } else {
                    return Err(ParseError::Syntax {
                        pos: start,
                        msg: "expected `==`".into(),
                    });
                }
            }
            '&' => {
                if bytes.get(i + 1) == Some(&'&') {
                    out.push((start, Tok::AndAnd));
                    i += 1;
                } else {
                    return Err(ParseError::Syntax {
                        pos: start,
                        msg: "expected `&&`".into(),
                    });
                }
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j + 1 < bytes.len() && bytes[j] == '.' && bytes[j + 1].is_ascii_digit() {
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                let lit: String = bytes[i..j].iter().collect();
                let value = lit.parse::<Rational>().map_err(|_| ParseError::Syntax {
                    pos: start,
                    msg: format!("bad number `{lit}`"),
                })?;
                out.push((start, Tok::Num(value)));
                i = j;
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == '_') {
                    j += 1;
                }
                out.push((start, Tok::Ident(bytes[i..j].iter().collect())));
                i = j;
                continue;
            }
            other => return Err(ParseError::UnknownCharacter { ch: other, pos: start }),
        }
        i += 1;
    }
    Ok(out)
}

/// Identifiers in order of first appearance.
pub fn identifiers(text: &str) -> Result<Vec<String>, ParseError> {
    let mut seen = Vec::new();
    for (_, t) in lex(text)? {
        if let Tok::Ident(name) = t {
            if !seen.contains(&name) {
                seen.push(name);
            }
        }
    }
    Ok(seen)
}

pub(crate) struct Parser<'a, F: FnMut(&str) -> VarId> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
    resolve: F,
}

impl<'a, F: FnMut(&str) -> VarId> Parser<'a, F> {
    pub(crate) fn new(toks: &'a [(usize, Tok)], end: usize, resolve: F) -> Self {
        Parser { toks, pos: 0, end, resolve }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    pub(crate) fn at(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    pub(crate) fn done(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos: self.at(),
            msg: msg.into(),
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = if self.eat(&Tok::Minus) {
            -self.term()?
        } else {
            self.eat(&Tok::Plus);
            self.term()?
        };
        loop {
            if self.eat(&Tok::Plus) {
                acc = &acc + &self.term()?;
            } else if self.eat(&Tok::Minus) {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let at = self.at();
                    let d = self.power()?;
                    let inv = d.as_constant().and_then(|c| c.recip()).ok_or(ParseError::Syntax {
                        pos: at,
                        msg: "division is only allowed by a nonzero constant".into(),
                    })?;
                    acc = acc.scale(&inv);
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if self.eat(&Tok::Caret) {
            match self.peek().cloned() {
                Some(Tok::Num(n)) if n.is_integer() && !n.is_negative() => {
                    self.pos += 1;
                    let e: u32 = n.to_string().parse().map_err(|_| self.err("exponent too large"))?;
                    Ok(base.pow(e))
                }
                _ => Err(self.err("expected a non-negative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Polynomial::constant(n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Polynomial::var((self.resolve)(&name)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.err("expected `)`"));
                }
                Ok(inner)
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-self.power()?)
            }
            Some(_) => Err(self.err("expected a number, identifier or `(`")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parses one polynomial, mapping identifiers through `resolve`.
pub fn parse_polynomial(text: &str, resolve: impl FnMut(&str) -> VarId) -> Result<Polynomial, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks, text.chars().count(), resolve);
    let out = p.expr()?;
    if !p.done() {
        return Err(ParseError::Syntax {
            pos: p.at(),
            msg: "trailing input".into(),
        });
    }
    Ok(out)
}
