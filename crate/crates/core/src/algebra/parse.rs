//! Text form of polynomials.
//!
//! ```text
//! expr     := ['-'] term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := rational | var | var '^' nat | '(' expr ')'
//! rational := nat ['/' nat]
//! ```

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::polynomial::Polynomial;
use super::var::VariableTable;
use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((start, Tok::Num(text[start..i].parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() || c == '_' || c == '@' {
            let start = i;
            i += 1;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Parse { pos: i, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    table: &'a VariableTable,
    warnings: Vec<String>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.offset(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let negate = self.eat('-');
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        loop {
            if self.eat('+') {
                acc += &self.term()?;
            } else if self.eat('-') {
                acc -= &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            let f = self.factor()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn nat(&mut self) -> Result<BigInt> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(n)
            }
            _ => self.error("expected a natural number"),
        }
    }

    fn exponent(&mut self) -> Result<u32> {
        let n = self.nat()?;
        u32::try_from(n).or_else(|_| self.error("exponent too large"))
    }

    fn factor(&mut self) -> Result<Polynomial> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let mut q = Scalar::from_integer(n);
                if self.eat('/') {
                    let d = self.nat()?;
                    if d.is_zero() {
                        return self.error("zero denominator");
                    }
                    q /= Scalar::from_integer(d);
                }
                Ok(Polynomial::constant(q))
            }
            Some(Tok::Ident(name)) => {
                let Some(v) = self.table.lookup(&name) else {
                    return Err(Error::UnknownVariable(name));
                };
                self.pos += 1;
                let e = if self.eat('^') { self.exponent()? } else { 1 };
                if v.is_odd() && e > 1 {
                    self.warnings.push(format!("odd variable `{name}` raised to power {e} is zero"));
                    return Ok(Polynomial::zero());
                }
                if e == 0 {
                    return Ok(Polynomial::one());
                }
                Ok(Polynomial::term(Monomial::from_sorted(vec![(v, e)]), Scalar::one()))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.error("expected `)`");
                }
                if self.eat('^') {
                    let e = self.exponent()?;
                    return Ok(inner.pow(e));
                }
                Ok(inner)
            }
            Some(t) => self.error(format!("unexpected token {t}")),
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parses a polynomial, returning diagnostics (odd powers collapsed to zero).
pub fn parse_with_warnings(text: &str, table: &VariableTable) -> Result<(Polynomial, Vec<String>)> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len(), table, warnings: Vec::new() };
    let value = p.expr()?;
    if p.pos != p.toks.len() {
        return p.error("trailing input");
    }
    Ok((value, p.warnings))
}

pub fn parse(text: &str, table: &VariableTable) -> Result<Polynomial> {
    parse_with_warnings(text, table).map(|(p, _)| p)
}

/// Deterministic text form: terms by ascending internal degree, then in
/// canonical monomial order.
pub fn serialize(p: &Polynomial, table: &VariableTable) -> String {
    let mut terms: Vec<(i64, &Monomial, &Scalar)> =
        p.terms().map(|(m, c)| (m.internal_degree(table), m, c)).collect();
    terms.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (_, m, c)) in terms.into_iter().enumerate() {
        let negative = c.is_negative();
        let abs = c.abs();
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if m.is_one() {
            out.push_str(&scalar::format(&abs));
        } else {
            if !abs.is_one() {
                out.push_str(&scalar::format(&abs));
                out.push('*');
            }
            out.push_str(&m.display(table));
        }
    }
    out
}
