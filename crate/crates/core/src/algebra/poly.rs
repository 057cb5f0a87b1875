//! Sparse multivariate polynomials with exact coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use super::field::{FieldSpec, Scalar};
use crate::error::{Error, Result};

/// Exponent vector ordered by graded lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors of total degree exactly `d` in `nvars` variables,
/// in descending graded-lex order.
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(nvars: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == nvars {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e);
            rec(nvars, d - e, prefix, out);
            prefix.pop();
        }
    }
    if nvars == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    rec(nvars, d, &mut Vec::new(), &mut out);
    out
}

/// A polynomial in `nvars` variables; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    field: FieldSpec,
    terms: BTreeMap<Monomial, Scalar>,
}

impl MultiPoly {
    pub fn zero(nvars: usize, field: FieldSpec) -> Self {
        MultiPoly {
            nvars,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Scalar, nvars: usize) -> Self {
        let field = c.field();
        let mut p = Self::zero(nvars, field);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(i: usize, nvars: usize, field: FieldSpec) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars, field);
        p.add_term(e, field.one());
        p
    }

    pub fn from_terms<I>(nvars: usize, field: FieldSpec, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Scalar)>,
    {
        let mut p = Self::zero(nvars, field);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::ArityMismatch {
                    expected: nvars,
                    found: e.len(),
                });
            }
            if c.field() != field {
                return Err(Error::FieldMismatch(c.field().to_string(), field.to_string()));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Linear form `sum coeffs[i] * x_i`.
    pub fn linear(coeffs: &[Scalar], field: FieldSpec) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n, field);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let key = Monomial(e);
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let s = &*existing + &c;
                if s.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Scalar)> {
        self.terms.iter().rev().map(|(m, c)| (m.exponents(), c))
    }

    pub fn coefficient(&self, exps: &[u32]) -> Scalar {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn scale(&self, c: &Scalar) -> MultiPoly {
        let mut out = Self::zero(self.nvars, self.field);
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v * c);
        }
        out
    }

    pub fn checked_add(&self, rhs: &MultiPoly) -> Result<MultiPoly> {
        self.compatible(rhs)?;
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.0.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, rhs: &MultiPoly) -> Result<MultiPoly> {
        self.checked_add(&rhs.neg())
    }

    pub fn checked_mul(&self, rhs: &MultiPoly) -> Result<MultiPoly> {
        self.compatible(rhs)?;
        let mut out = Self::zero(self.nvars, self.field);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let e = ma.0.iter().zip(&mb.0).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -&*c;
        }
        out
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = Self::constant(self.field.one(), self.nvars);
        for _ in 0..e {
            acc = acc.checked_mul(self).expect("same ring");
        }
        acc
    }

    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let powers = power_table(point, self.max_exponents());
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    pub(crate) fn max_exponents(&self) -> Vec<u32> {
        let mut mx = vec![0; self.nvars];
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                mx[i] = mx[i].max(e);
            }
        }
        mx
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> MultiPoly {
        let mut out = Self::zero(self.nvars, self.field);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.add_term(exps, c * &self.field.from_u64(e as u64));
        }
        out
    }

    /// Substitutes `subs[i]` for variable `i`. All substitutes share one ring.
    pub fn compose(&self, subs: &[MultiPoly]) -> Result<MultiPoly> {
        if subs.len() != self.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                found: subs.len(),
            });
        }
        let target_vars = match subs.first() {
            Some(s) => s.nvars,
            None => 0,
        };
        if subs.iter().any(|s| s.nvars != target_vars || s.field != self.field) {
            return Err(Error::DimensionMismatch("substitutes live in different rings".into()));
        }
        // Cache powers of each substitute.
        let mx = self.max_exponents();
        let mut powers: Vec<Vec<MultiPoly>> = Vec::with_capacity(self.nvars);
        for (i, s) in subs.iter().enumerate() {
            let mut row = vec![Self::constant(self.field.one(), target_vars)];
            for e in 1..=mx[i] as usize {
                let next = row[e - 1].checked_mul(s)?;
                row.push(next);
            }
            powers.push(row);
        }
        let mut out = Self::zero(target_vars, self.field);
        for (m, c) in &self.terms {
            let mut t = Self::constant(c.clone(), target_vars);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.checked_mul(&powers[i][e as usize])?;
                }
            }
            out = out.checked_add(&t)?;
        }
        Ok(out)
    }

    /// Coefficients `[c_0, c_1, ..., c_d]` of a univariate polynomial.
    pub fn univariate_coeffs(&self) -> Result<Vec<Scalar>> {
        if self.nvars != 1 {
            return Err(Error::ArityMismatch {
                expected: 1,
                found: self.nvars,
            });
        }
        let d = self.degree().unwrap_or(0) as usize;
        let mut out = vec![self.field.zero(); d + 1];
        for (m, c) in &self.terms {
            out[m.0[0] as usize] = c.clone();
        }
        Ok(out)
    }

    pub fn from_univariate_coeffs(coeffs: &[Scalar], field: FieldSpec) -> MultiPoly {
        let mut p = Self::zero(1, field);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(vec![i as u32], c.clone());
        }
        p
    }

    /// Maps the coefficients into another field (e.g. reduces integers mod p).
    pub fn map_coeffs(&self, field: FieldSpec, f: impl Fn(&Scalar) -> Scalar) -> MultiPoly {
        let mut out = Self::zero(self.nvars, field);
        for (m, c) in &self.terms {
            out.add_term(m.0.clone(), f(c));
        }
        out
    }

    fn compatible(&self, rhs: &MultiPoly) -> Result<()> {
        if self.field != rhs.field {
            return Err(Error::FieldMismatch(self.field.to_string(), rhs.field.to_string()));
        }
        if self.nvars != rhs.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                found: rhs.nvars,
            });
        }
        Ok(())
    }

    /// Parses expressions such as `x0^2*x1 - 3*x2 + 7` over variables `x0..x{nvars-1}`.
    pub fn parse(src: &str, nvars: usize, field: FieldSpec) -> Result<MultiPoly> {
        let names: Vec<String> = (0..nvars).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Self::parse_with_vars(src, &refs, field)
    }

    pub fn parse_with_vars(src: &str, vars: &[&str], field: FieldSpec) -> Result<MultiPoly> {
        let tokens = tokenize(src)?;
        let mut parser = Parser {
            tokens,
            pos: 0,
            vars,
            field,
        };
        let p = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::Parse(format!(
                "unexpected token {:?} in {src:?}",
                parser.tokens[parser.pos]
            )));
        }
        Ok(p)
    }
}

pub(crate) fn power_table(point: &[Scalar], max_exp: Vec<u32>) -> Vec<Vec<Scalar>> {
    point
        .iter()
        .zip(max_exp)
        .map(|(x, mx)| {
            let mut row = vec![x.field().one()];
            for e in 1..=mx as usize {
                let next = &row[e - 1] * x;
                row.push(next);
            }
            row
        })
        .collect()
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, c) in self.terms() {
            let mut coeff = c.to_string();
            let negative = coeff.starts_with('-');
            if negative {
                coeff.remove(0);
            }
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("x{i}")),
                    _ => factors.push(format!("x{i}^{e}")),
                }
            }
            if factors.is_empty() {
                write!(f, "{coeff}")?;
            } else if coeff == "1" {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{coeff}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{} vars over {}]({self})", self.nvars, self.field)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
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
            let s: String = chars[start..i].iter().collect();
            out.push(Token::Num(s.parse().expect("digits")));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*^()".contains(c) {
            out.push(Token::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [&'a str],
    field: FieldSpec,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.checked_add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.checked_sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.power()?;
        while self.eat('*') {
            acc = acc.checked_mul(&self.power()?)?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<MultiPoly> {
        if self.eat('-') {
            return Ok(self.power()?.neg());
        }
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Token::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = (&n)
                        .try_into()
                        .map_err(|_| Error::Parse(format!("exponent {n} too large")))?;
                    return Ok(base.pow(e));
                }
                other => return Err(Error::Parse(format!("expected exponent, found {other:?}"))),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let n = self.vars.len();
        match self.peek().cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                let c = self.field.from_ratio(&v, &BigInt::from(1))?;
                Ok(MultiPoly::constant(c, n))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                let i = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable {name:?}")))?;
                Ok(MultiPoly::var(i, n, self.field))
            }
            Some(Token::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp() -> FieldSpec {
        FieldSpec::prime(1009).unwrap()
    }

    #[test]
    fn grlex_printing_is_canonical() {
        let p = MultiPoly::parse("x1 + 3*x0*x1 + x0^2 - 2", 2, FieldSpec::rationals()).unwrap();
        assert_eq!(p.to_string(), "x0^2 + 3*x0*x1 + x1 - 2");
        let q = MultiPoly::parse("-2 + x1 + x0^2 + x1*x0*3", 2, FieldSpec::rationals()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn cancellation_drops_terms() {
        let p = MultiPoly::parse("x0*x1 - x1*x0 + 0*x0", 2, fp()).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
    }

    #[test]
    fn degree_is_additive() {
        let f = fp();
        let p = MultiPoly::parse("x0^3 + x1", 2, f).unwrap();
        let q = MultiPoly::parse("x0*x1 - 5", 2, f).unwrap();
        assert_eq!(p.checked_mul(&q).unwrap().degree(), Some(5));
    }

    #[test]
    fn derivative_and_eval() {
        let f = FieldSpec::rationals();
        let p = MultiPoly::parse("x0^2 + 3*x0*x1", 2, f).unwrap();
        assert_eq!(p.derivative(0).to_string(), "2*x0 + 3*x1");
        assert_eq!(p.eval(&[f.from_i64(2), f.from_i64(5)]).unwrap(), f.from_i64(34));
        assert!(p.eval(&[f.from_i64(2)]).is_err());
    }

    #[test]
    fn composition_substitutes() {
        let f = fp();
        let p = MultiPoly::parse("x0^2 - x1", 2, f).unwrap();
        let t = MultiPoly::parse("x0 + 1", 1, f).unwrap();
        let c = MultiPoly::parse("2*x0", 1, f).unwrap();
        let r = p.compose(&[t, c]).unwrap();
        assert_eq!(r, MultiPoly::parse("x0^2 + 1", 1, f).unwrap());
    }

    #[test]
    fn monomial_enumeration_counts() {
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
        assert_eq!(monomials_of_degree(3, 3).len(), 10);
        assert_eq!(monomials_of_degree(2, 5).len(), 6);
        assert_eq!(monomials_of_degree(3, 2)[0], vec![2, 0, 0]);
        assert_eq!(*monomials_of_degree(3, 2).last().unwrap(), vec![0, 0, 2]);
    }

    #[test]
    fn parse_errors() {
        assert!(MultiPoly::parse("x3", 2, fp()).is_err());
        assert!(MultiPoly::parse("x0 +", 2, fp()).is_err());
        assert!(MultiPoly::parse("x0 $ 1", 2, fp()).is_err());
    }
}
