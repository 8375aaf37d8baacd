//! Text form of polynomials: `3*A1^2*P1 - 1/2*x + 7`.
//!
//! Rendering lists terms in decreasing grevlex order. The parser accepts
//! sums and differences of products of integers, variables, powers with
//! integer exponents and parenthesized subexpressions; `/` is allowed only
//! with a nonzero constant on the right.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use super::{MonomialOrder, Poly, Ring};
use crate::error::{Error, Result};
use crate::exactnum::Field;

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let vars = self.ring().vars();
        for (k, (m, c)) in self
            .sorted_terms(MonomialOrder::Grevlex)
            .into_iter()
            .enumerate()
        {
            let cs = c.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, cs),
            };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors = Vec::new();
            if mag != "1" || m.is_one() {
                factors.push(mag);
            }
            for (v, &e) in vars.iter().zip(m.exponents()) {
                match e {
                    0 => {}
                    1 => factors.push(v.clone()),
                    _ => factors.push(format!("{v}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            out.push(Token::Num(lit.parse().expect("digits parse as an integer")));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!(
                "unexpected character `{c}` at offset {i}"
            )));
        }
    }
    Ok(out)
}

struct Parser<'a, F: Field> {
    ring: &'a Arc<Ring<F>>,
    toks: Vec<Token>,
    pos: usize,
}

impl<F: Field> Parser<'_, F> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly<F>> {
        let mut acc = Poly::zero(self.ring);
        let mut first = true;
        loop {
            let neg = if self.eat('-') {
                true
            } else {
                let plus = self.eat('+');
                if !first && !plus {
                    return Ok(acc);
                }
                false
            };
            let t = self.term()?;
            acc = if neg { &acc - &t } else { &acc + &t };
            first = false;
        }
    }

    fn term(&mut self) -> Result<Poly<F>> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                let rhs = self.power()?;
                acc = &acc * &rhs;
            } else if self.eat('/') {
                let rhs = self.power()?;
                let c = rhs
                    .as_constant()
                    .ok_or_else(|| Error::Parse("division by a non-constant".into()))?;
                let inv = self
                    .ring
                    .field()
                    .inv(&c)
                    .ok_or_else(|| Error::Parse("division by zero".into()))?;
                acc = acc.scale(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Poly<F>> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Token::Num(n)) => {
                    self.pos += 1;
                    let e = u32::try_from(&n)
                        .map_err(|_| Error::Parse(format!("exponent {n} too large")))?;
                    Ok(base.pow(e))
                }
                _ => Err(Error::Parse(
                    "expected a nonnegative integer exponent".into(),
                )),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly<F>> {
        match self.toks.get(self.pos).cloned() {
            Some(Token::Num(n)) => {
                self.pos += 1;
                Ok(Poly::constant(
                    self.ring,
                    self.ring.field().from_integer(&n),
                ))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                let v = self
                    .ring
                    .var_index(&name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable `{name}`")))?;
                Ok(Poly::var(self.ring, v))
            }
            Some(Token::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                Ok(e)
            }
            Some(t) => Err(Error::Parse(format!("unexpected token {t:?}"))),
            None => Err(Error::Parse("unexpected end of input".into())),
        }
    }
}

impl<F: Field> Poly<F> {
    /// Parses the text form in the given ring.
    pub fn parse(ring: &Arc<Ring<F>>, s: &str) -> Result<Self> {
        let toks = tokenize(s)?;
        if toks.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut p = Parser { ring, toks, pos: 0 };
        let out = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
        }
        Ok(out)
    }
}
