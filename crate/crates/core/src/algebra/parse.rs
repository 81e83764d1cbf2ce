//! Expression grammar for homogeneous forms.
//!
//! ```text
//! expr   = term { ("+" | "-") term } ;
//! term   = unary { "*" unary } ;
//! unary  = "-" unary | "+" unary | power ;
//! power  = atom [ "^" integer ] ;
//! atom   = integer [ "/" integer ] | "z" | "w" | "t" | "(" expr ")" ;
//! ```
//!
//! Whitespace is ignored. `/` is only allowed between two integer literals.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::{HomogPoly, Monomial};
use super::Rational;
use crate::error::{Error, Result};

type Sparse = BTreeMap<Monomial, Rational>;

fn sparse_mul(a: &Sparse, b: &Sparse) -> Sparse {
    let mut out = Sparse::new();
    for (m, x) in a {
        for (n, y) in b {
            *out.entry(m.mul(n)).or_insert_with(Rational::zero) += x * y;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn sparse_add(a: &mut Sparse, b: Sparse, sign: i32) {
    for (m, c) in b {
        let e = a.entry(m).or_insert_with(Rational::zero);
        if sign < 0 {
            *e -= c;
        } else {
            *e += c;
        }
    }
    a.retain(|_, c| !c.is_zero());
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse::<BigInt>().unwrap())
    }

    fn expr(&mut self) -> Result<Sparse> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    sparse_add(&mut acc, t, 1);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    sparse_add(&mut acc, t, -1);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Sparse> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let u = self.unary()?;
            acc = sparse_mul(&acc, &u);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Sparse> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                let mut u = self.unary()?;
                for c in u.values_mut() {
                    *c = -c.clone();
                }
                Ok(u)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Sparse> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| self.err("exponent too large"))?;
            if e > 256 {
                return Err(self.err("exponent too large"));
            }
            let mut acc = Sparse::new();
            acc.insert(Monomial::one(), Rational::one());
            for _ in 0..e {
                acc = sparse_mul(&acc, &base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Sparse> {
        let mut out = Sparse::new();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let value = if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let d = self.integer()?;
                    if d.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    Rational::new(n, d)
                } else {
                    Rational::from_integer(n)
                };
                if !value.is_zero() {
                    out.insert(Monomial::one(), value);
                }
                Ok(out)
            }
            Some(c @ (b'z' | b'w' | b't')) => {
                let idx = match c {
                    b'z' => 0,
                    b'w' => 1,
                    _ => 2,
                };
                if idx >= self.nvars {
                    return Err(self.err("variable t is not available on P^1"));
                }
                self.pos += 1;
                out.insert(Monomial::var(idx), Rational::one());
                Ok(out)
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) => Err(self.err(format!("unexpected character '{}'", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

impl HomogPoly {
    /// Parses and expands an expression in the variables `z, w` (`nvars = 2`)
    /// or `z, w, t` (`nvars = 3`). Inhomogeneous input is rejected.
    pub fn parse(text: &str, nvars: usize) -> Result<HomogPoly> {
        if nvars != 2 && nvars != 3 {
            return Err(Error::Arity(format!("{nvars} variables")));
        }
        let mut p = Parser { src: text.as_bytes(), pos: 0, nvars };
        let s = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        HomogPoly::from_terms(nvars, s)
    }
}
