//! Homogeneous polynomials in two or three variables with exact rational
//! coefficients.
//!
//! Variables are `z, w` on P^1 and `z, w, t` on P^2. Terms are kept in a
//! `BTreeMap` keyed by [`Monomial`], whose ordering is degree-reverse
//! lexicographic with `z > w > t`, so the last entry of the map is always the
//! leading term.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;
use crate::error::{Error, Result};

pub const VAR_NAMES: [&str; 3] = ["z", "w", "t"];

/// Exponent vector. Unused trailing slots are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(pub [u32; 3]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; 3])
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial([self.0[0] + other.0[0], self.0[1] + other.0[1], self.0[2] + other.0[2]])
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        (0..3).all(|i| self.0[i] <= other.0[i])
    }

    /// `other / self`, assuming `self.divides(other)`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial([other.0[0] - self.0[0], other.0[1] - self.0[1], other.0[2] - self.0[2]])
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial([
            self.0[0].min(other.0[0]),
            self.0[1].min(other.0[1]),
            self.0[2].min(other.0[2]),
        ])
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0[2].cmp(&self.0[2]))
            .then_with(|| other.0[1].cmp(&self.0[1]))
            .then_with(|| self.0[0].cmp(&other.0[0]))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Homogeneous polynomial over the rationals.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HomogPoly {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Monomial, Rational>,
}

impl HomogPoly {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars == 2 || nvars == 3, "only 2 or 3 variables are supported");
        HomogPoly { nvars, degree: 0, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        Self::monomial(nvars, Monomial::var(i), Rational::one())
    }

    pub fn monomial(nvars: usize, m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.degree = m.degree();
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds a polynomial from raw terms, merging duplicates and dropping
    /// zeros. Fails if the surviving terms are not all of one degree.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut map: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in terms {
            if nvars == 2 && m.0[2] != 0 {
                return Err(Error::Arity("variable t used in a binary form".into()));
            }
            *map.entry(m).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        let mut degree = None;
        for m in map.keys() {
            match degree {
                None => degree = Some(m.degree()),
                Some(d) if d != m.degree() => {
                    return Err(Error::Inhomogeneous { first: d, second: m.degree() })
                }
                _ => {}
            }
        }
        Ok(HomogPoly { nvars, degree: degree.unwrap_or(0), terms: map })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn is_constant(&self) -> bool {
        self.degree == 0
    }

    /// Indices of variables that occur in some term.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&i| self.terms.keys().any(|m| m.0[i] > 0)).collect()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        HomogPoly {
            nvars: self.nvars,
            degree: self.degree,
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Self {
        if c.is_zero() || self.is_zero() {
            return Self::zero(self.nvars);
        }
        HomogPoly {
            nvars: self.nvars,
            degree: self.degree + m.degree(),
            terms: self.terms.iter().map(|(k, x)| (k.mul(m), x * c)).collect(),
        }
    }

    fn check_add(&self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        assert!(
            self.is_zero() || other.is_zero() || self.degree == other.degree,
            "adding forms of degree {} and {}",
            self.degree,
            other.degree
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_add(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let e = out.terms.entry(*m).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                out.terms.remove(m);
            }
        }
        out.fix_degree();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.nvars);
        }
        let mut terms: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                *terms.entry(a.mul(b)).or_insert_with(Rational::zero) += x * y;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        HomogPoly { nvars: self.nvars, degree: self.degree + other.degree, terms }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(self.nvars, Rational::one());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    fn fix_degree(&mut self) {
        self.degree = self.terms.keys().next().map_or(0, Monomial::degree);
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e > 0 {
                let mut k = *m;
                k.0[i] -= 1;
                out.terms.insert(k, c * Rational::from_integer(BigInt::from(e)));
            }
        }
        if !out.terms.is_empty() {
            out.degree = self.degree - 1;
        }
        out
    }

    /// Substitutes `subs[i]` for variable `i`. All substituted forms must
    /// share one degree and one variable count.
    pub fn compose(&self, subs: &[HomogPoly]) -> Self {
        assert_eq!(subs.len(), self.nvars, "substitution arity");
        let target_vars = subs[0].nvars;
        if self.is_zero() {
            return Self::zero(target_vars);
        }
        let mut powers: Vec<Vec<HomogPoly>> = Vec::with_capacity(self.nvars);
        for (i, s) in subs.iter().enumerate() {
            let maxe = self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0);
            let mut v = vec![Self::constant(target_vars, Rational::one())];
            for _ in 0..maxe {
                let next = v.last().unwrap().mul(s);
                v.push(next);
            }
            powers.push(v);
        }
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut prod = powers[0][m.0[0] as usize].clone();
            for i in 1..self.nvars {
                prod = prod.mul(&powers[i][m.0[i] as usize]);
            }
            for (k, x) in prod.terms {
                *acc.entry(k).or_insert_with(Rational::zero) += x * c;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        HomogPoly::from_terms(target_vars, acc).expect("composition of forms is homogeneous")
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        let mut s = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..self.nvars {
                for _ in 0..m.0[i] {
                    t *= &x[i];
                }
            }
            s += t;
        }
        s
    }

    pub fn eval_int(&self, x: &[BigInt]) -> Rational {
        let xs: Vec<Rational> = x.iter().map(|v| Rational::from_integer(v.clone())).collect();
        self.eval(&xs)
    }

    pub fn eval_complex(&self, x: &[Complex64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = Complex64::new(super::rat_to_f64(c), 0.0);
            for i in 0..self.nvars {
                t *= x[i].powu(m.0[i]);
            }
            s += t;
        }
        s
    }

    /// Sum of absolute values of the coefficients, as a double.
    pub fn coeff_l1(&self) -> f64 {
        self.terms.values().map(|c| super::rat_to_f64(c).abs()).sum()
    }

    /// Rational content: positive rational `c` such that `self / c` has
    /// coprime integer coefficients.
    pub fn content(&self) -> Rational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Rational::one();
        }
        Rational::new(num, den)
    }

    /// Primitive integer representative with positive leading coefficient
    /// (degrevlex, `z > w > t`). This is the normal form used to compare
    /// components up to scalars.
    pub fn normalized(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.leading().unwrap().1.is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    pub fn is_normalized(&self) -> bool {
        *self == self.normalized()
    }

    /// Coefficients as integers, assuming they are integral.
    pub fn integer_terms(&self) -> Vec<(Monomial, BigInt)> {
        self.terms
            .iter()
            .map(|(m, c)| {
                debug_assert!(c.is_integer());
                (*m, c.to_integer())
            })
            .collect()
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(),
            Some(first) => it.fold(*first, |g, m| g.gcd(m)),
        }
    }

    /// Exact division by a monomial that divides every term.
    pub fn div_monomial(&self, m: &Monomial) -> Self {
        HomogPoly {
            nvars: self.nvars,
            degree: if self.is_zero() { 0 } else { self.degree - m.degree() },
            terms: self.terms.iter().map(|(k, c)| (m.quotient_of(k), c.clone())).collect(),
        }
    }

    /// Multivariate division by a single polynomial. Returns `(quotient,
    /// remainder)` with no remainder term divisible by the leading monomial
    /// of `divisor`. For a principal ideal the remainder is a normal form.
    pub fn div_rem(&self, divisor: &HomogPoly) -> (HomogPoly, HomogPoly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let (lm, lc) = divisor.leading().map(|(m, c)| (*m, c.clone())).unwrap();
        let mut work = self.terms.clone();
        let mut quot: BTreeMap<Monomial, Rational> = BTreeMap::new();
        let mut rem: BTreeMap<Monomial, Rational> = BTreeMap::new();
        while let Some((m, c)) = work.pop_last() {
            if lm.divides(&m) {
                let qm = lm.quotient_of(&m);
                let qc = &c / &lc;
                for (dm, dc) in divisor.terms.iter().rev().skip(1) {
                    let k = dm.mul(&qm);
                    let e = work.entry(k).or_insert_with(Rational::zero);
                    *e -= &qc * dc;
                    if e.is_zero() {
                        work.remove(&k);
                    }
                }
                quot.insert(qm, qc);
            } else {
                rem.insert(m, c);
            }
        }
        let q = HomogPoly {
            nvars: self.nvars,
            degree: if quot.is_empty() { 0 } else { self.degree - divisor.degree },
            terms: quot,
        };
        let r = HomogPoly {
            nvars: self.nvars,
            degree: if rem.is_empty() { 0 } else { self.degree },
            terms: rem,
        };
        (q, r)
    }

    /// `self / divisor` when the division is exact.
    pub fn div_exact(&self, divisor: &HomogPoly) -> Option<HomogPoly> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &HomogPoly) -> bool {
        other.div_exact(self).is_some()
    }

    /// Reduction modulo `divisor` (the remainder of [`div_rem`](Self::div_rem)).
    pub fn reduce(&self, divisor: &HomogPoly) -> HomogPoly {
        self.div_rem(divisor).1
    }

    /// All monomials of the given degree in `nvars` variables, ascending.
    pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        if nvars == 2 {
            for a in 0..=degree {
                out.push(Monomial([a, degree - a, 0]));
            }
        } else {
            for a in 0..=degree {
                for b in 0..=(degree - a) {
                    out.push(Monomial([a, b, degree - a - b]));
                }
            }
        }
        out.sort();
        out
    }
}

fn fmt_rational_abs(c: &Rational) -> String {
    let a = c.abs();
    if a.is_integer() {
        a.to_integer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

impl fmt::Display for HomogPoly {
    /// Canonical rendering in the expression grammar accepted by
    /// [`HomogPoly::parse`]; terms in descending degrevlex order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            let abs = c.abs();
            if !abs.is_one() || m.degree() == 0 {
                factors.push(fmt_rational_abs(c));
            }
            for i in 0..self.nvars {
                match m.0[i] {
                    0 => {}
                    1 => factors.push(VAR_NAMES[i].to_string()),
                    e => factors.push(format!("{}^{}", VAR_NAMES[i], e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}
