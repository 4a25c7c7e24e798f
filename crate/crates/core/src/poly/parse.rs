use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{spatial_names, Monomial, PolyError, Polynomial, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

fn err(pos: usize, msg: impl Into<String>) -> PolyError {
    PolyError::Parse(ParseError {
        pos,
        msg: msg.into(),
    })
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((start, Tok::Plus));
                i += 1
            }
            '-' => {
                out.push((start, Tok::Minus));
                i += 1
            }
            '*' => {
                out.push((start, Tok::Star));
                i += 1
            }
            '/' => {
                out.push((start, Tok::Slash));
                i += 1
            }
            '^' => {
                out.push((start, Tok::Caret));
                i += 1
            }
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("digits");
                out.push((start, Tok::Num(n)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            other => return Err(err(start, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    n: usize,
    names: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        if name == "s" {
            return Some(self.n);
        }
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return Some(i);
        }
        // x1..xn are always accepted
        let idx: usize = name.strip_prefix('x')?.parse().ok()?;
        (1..=self.n).contains(&idx).then(|| idx - 1)
    }

    fn polynomial(&mut self) -> Result<Polynomial, PolyError> {
        let mut out = Polynomial::zero(self.n);
        let mut first = true;
        loop {
            let negative = match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    false
                }
                Some(Tok::Minus) => {
                    self.next();
                    true
                }
                None if first => return Err(err(self.pos(), "empty polynomial")),
                None => break,
                _ if first => false,
                _ => return Err(err(self.pos(), "expected `+` or `-` between terms")),
            };
            first = false;
            let (m, mut c) = self.term()?;
            if negative {
                c = -c;
            }
            out.add_term(m, c);
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Monomial, Rational), PolyError> {
        let mut exps = vec![0u32; self.n + 1];
        let mut coef = Rational::one();
        loop {
            self.factor(&mut exps, &mut coef)?;
            if self.peek() == Some(&Tok::Star) {
                self.next();
            } else {
                break;
            }
        }
        Ok((Monomial(exps), coef))
    }

    fn factor(&mut self, exps: &mut [u32], coef: &mut Rational) -> Result<(), PolyError> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Num(num)) => {
                let mut value = Rational::from_integer(num);
                if self.peek() == Some(&Tok::Slash) {
                    self.next();
                    let dpos = self.pos();
                    match self.next() {
                        Some(Tok::Num(den)) if !den.is_zero() => {
                            value /= Rational::from_integer(den);
                        }
                        Some(Tok::Num(_)) => return Err(err(dpos, "zero denominator")),
                        _ => return Err(err(dpos, "expected denominator")),
                    }
                }
                *coef *= value;
                Ok(())
            }
            Some(Tok::Ident(name)) => {
                let idx = self
                    .var_index(&name)
                    .ok_or_else(|| PolyError::UnknownVariable(name.clone()))?;
                let mut e = 1u32;
                if self.peek() == Some(&Tok::Caret) {
                    self.next();
                    let epos = self.pos();
                    match self.next() {
                        Some(Tok::Num(n)) => {
                            e = u32::try_from(n).map_err(|_| err(epos, "exponent too large"))?;
                        }
                        _ => return Err(err(epos, "expected exponent")),
                    }
                }
                exps[idx] += e;
                Ok(())
            }
            Some(_) => Err(err(pos, "expected a number or variable")),
            None => Err(err(pos, "unexpected end of input")),
        }
    }
}

pub(super) fn parse(text: &str, n: usize) -> Result<Polynomial, PolyError> {
    let toks = lex(text)?;
    let mut parser = Parser {
        toks,
        at: 0,
        end: text.len(),
        n,
        names: spatial_names(n),
    };
    parser.polynomial()
}
