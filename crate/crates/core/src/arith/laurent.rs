//! Sparse multivariate Laurent polynomials over the rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use rand::RngExt;
use serde::{Deserialize, Serialize};

use super::rational::{format_rational, int, is_negative, parse_rational, Rational};
use super::ArithError;

/// Exponents of a monomial, one slot per ring variable. Ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentVector(Vec<i32>);

impl ExponentVector {
    pub fn new(entries: Vec<i32>) -> Self {
        ExponentVector(entries)
    }

    pub fn zero(nvars: usize) -> Self {
        ExponentVector(vec![0; nvars])
    }

    pub fn unit(nvars: usize, var: usize, power: i32) -> Self {
        let mut e = vec![0; nvars];
        e[var] = power;
        ExponentVector(e)
    }

    pub fn entries(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn plus(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn negated(&self) -> ExponentVector {
        ExponentVector(self.0.iter().map(|a| -a).collect())
    }
}

/// A Laurent polynomial in `nvars` variables. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<ExponentVector, Rational>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(c, ExponentVector::zero(nvars))
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, int(c))
    }

    /// The coordinate function `x_var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        Self::monomial(Rational::one(), ExponentVector::unit(nvars, var, 1))
    }

    pub fn monomial(c: Rational, exp: ExponentVector) -> Self {
        let nvars = exp.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        LaurentPoly { nvars, terms }
    }

    /// Builds from `(coefficient, exponents)` pairs, merging repeats.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Rational, Vec<i32>)>,
    {
        let mut p = LaurentPoly::zero(nvars);
        for (c, e) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(ExponentVector(e), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exp: &ExponentVector) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    /// Constant term if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.is_zero().then(|| c.clone())
            }
            _ => None,
        }
    }

    fn add_term(&mut self, exp: ExponentVector, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&exp);
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    fn check_context(&self, other: &LaurentPoly) -> Result<(), ArithError> {
        if self.nvars != other.nvars {
            return Err(ArithError::Context { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &LaurentPoly) -> Result<LaurentPoly, ArithError> {
        self.check_context(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &LaurentPoly) -> Result<LaurentPoly, ArithError> {
        self.check_context(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &LaurentPoly) -> Result<LaurentPoly, ArithError> {
        self.check_context(other)?;
        let mut out = LaurentPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1.plus(e2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::one(self.nvars);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to variable `var` (0-based).
    pub fn partial(&self, var: usize) -> Result<LaurentPoly, ArithError> {
        if var >= self.nvars {
            return Err(ArithError::VariableIndex { index: var, nvars: self.nvars });
        }
        let mut out = LaurentPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e.0[var];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2.0[var] -= 1;
            out.add_term(e2, c * int(i64::from(k)));
        }
        Ok(out)
    }

    /// Splits into homogeneous parts keyed by multidegree. The parts sum to `self`.
    pub fn grade_split(&self) -> BTreeMap<ExponentVector, LaurentPoly> {
        self.terms
            .iter()
            .map(|(e, c)| (e.clone(), LaurentPoly::monomial(c.clone(), e.clone())))
            .collect()
    }

    /// `x^shift * self`.
    pub fn shift(&self, shift: &ExponentVector) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.plus(shift), c.clone())).collect(),
        }
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("ring context mismatch")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_sub(rhs).expect("ring context mismatch")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("ring context mismatch")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub invertible: bool,
}

/// Variable names and invertibility flags for a (Laurent) polynomial ring over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    vars: Vec<Variable>,
}

impl Ring {
    pub fn new(vars: Vec<Variable>) -> Result<Self, ArithError> {
        for (i, v) in vars.iter().enumerate() {
            let ok = !v.name.is_empty()
                && v.name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && v.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(ArithError::Parse(format!("invalid variable name `{}`", v.name)));
            }
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(ArithError::Parse(format!("duplicate variable `{}`", v.name)));
            }
        }
        Ok(Ring { vars })
    }

    /// `names[i]` with the given invertibility for all of them.
    pub fn uniform(names: &[&str], invertible: bool) -> Self {
        Ring::new(
            names
                .iter()
                .map(|n| Variable { name: (*n).to_string(), invertible })
                .collect(),
        )
        .expect("valid names")
    }

    /// Variables `x, y, z` for n ≤ 3 and `x1..xn` beyond.
    pub fn standard(n: usize, invertible: bool) -> Self {
        let names: Vec<String> = if n <= 3 {
            ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
        } else {
            (1..=n).map(|i| format!("x{i}")).collect()
        };
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Ring::uniform(&refs, invertible)
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn is_invertible(&self, var: usize) -> bool {
        self.vars[var].invertible
    }

    pub fn zero(&self) -> LaurentPoly {
        LaurentPoly::zero(self.nvars())
    }

    pub fn one(&self) -> LaurentPoly {
        LaurentPoly::one(self.nvars())
    }

    pub fn constant(&self, c: Rational) -> LaurentPoly {
        LaurentPoly::constant(self.nvars(), c)
    }

    pub fn var(&self, i: usize) -> LaurentPoly {
        LaurentPoly::var(self.nvars(), i)
    }

    pub fn admits(&self, exp: &ExponentVector) -> bool {
        exp.len() == self.nvars()
            && exp.0.iter().zip(&self.vars).all(|(&e, v)| e >= 0 || v.invertible)
    }

    /// Rejects polynomials of the wrong arity or with negative powers of non-invertible variables.
    pub fn validate(&self, p: &LaurentPoly) -> Result<(), ArithError> {
        if p.nvars != self.nvars() {
            return Err(ArithError::Context { left: p.nvars, right: self.nvars() });
        }
        for e in p.terms.keys() {
            if !self.admits(e) {
                return Err(ArithError::NotInvertible(self.format_monomial(e)));
            }
        }
        Ok(())
    }

    /// Some(inverse) iff `p` is a nonzero term whose non-invertible variables all have exponent 0.
    pub fn unit_inverse(&self, p: &LaurentPoly) -> Option<LaurentPoly> {
        if p.terms.len() != 1 {
            return None;
        }
        let (e, c) = p.terms.iter().next().unwrap();
        let inv = e.negated();
        if !self.admits(&inv) {
            return None;
        }
        Some(LaurentPoly::monomial(c.recip(), inv))
    }

    /// The ring generators `x_i` together with `x_i^{-1}` for invertible variables.
    pub fn generators(&self) -> Vec<LaurentPoly> {
        let n = self.nvars();
        let mut out = Vec::new();
        for (i, v) in self.vars.iter().enumerate() {
            out.push(LaurentPoly::var(n, i));
            if v.invertible {
                out.push(LaurentPoly::monomial(Rational::one(), ExponentVector::unit(n, i, -1)));
            }
        }
        out
    }

    fn format_monomial(&self, e: &ExponentVector) -> String {
        let parts: Vec<String> = e
            .0
            .iter()
            .zip(&self.vars)
            .filter(|(k, _)| **k != 0)
            .map(|(k, v)| if *k == 1 { v.name.clone() } else { format!("{}^{}", v.name, k) })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Canonical text form: terms in ascending lexicographic exponent order, e.g. `3/2*x^-1*y^2 + 1`.
    pub fn format(&self, p: &LaurentPoly) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (e, c)) in p.terms.iter().enumerate() {
            let neg = is_negative(c);
            let abs = c.abs();
            let mono = self.format_monomial(e);
            let body = if e.is_zero() {
                format_rational(&abs)
            } else if abs.is_one() {
                mono
            } else {
                format!("{}*{}", format_rational(&abs), mono)
            };
            match (idx, neg) {
                (0, false) => out.push_str(&body),
                (0, true) => {
                    out.push('-');
                    out.push_str(&body);
                }
                (_, false) => {
                    out.push_str(" + ");
                    out.push_str(&body);
                }
                (_, true) => {
                    out.push_str(" - ");
                    out.push_str(&body);
                }
            }
        }
        out
    }

    /// Parses sums of products of rationals and powers of variables,
    /// e.g. `x^-1*y - 3/2*x + 1`. Parenthesised exponents `x^(-1)` are accepted.
    pub fn parse(&self, s: &str) -> Result<LaurentPoly, ArithError> {
        let p = Parser { src: s.as_bytes(), pos: 0, ring: self }.expr()?;
        self.validate(&p)?;
        Ok(p)
    }

    /// A random polynomial with at most `max_terms` terms and exponents in `-max_exp..=max_exp`
    /// (non-negative for non-invertible variables); coefficients are small rationals.
    pub fn random_poly<R: rand::Rng + ?Sized>(
        &self,
        rng: &mut R,
        max_terms: usize,
        max_exp: i32,
    ) -> LaurentPoly {
        let n = self.nvars();
        let count = rng.random_range(0..=max_terms);
        let mut p = LaurentPoly::zero(n);
        for _ in 0..count {
            let exp: Vec<i32> = self
                .vars
                .iter()
                .map(|v| {
                    let lo = if v.invertible { -max_exp } else { 0 };
                    rng.random_range(lo..=max_exp)
                })
                .collect();
            let num: i64 = rng.random_range(-5..=5);
            let den: i64 = rng.random_range(1..=3);
            p.add_term(ExponentVector(exp), super::rational::ratio(num, den));
        }
        p
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Ring::standard(self.nvars, true).format(self))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ring: &'a Ring,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ArithError {
        ArithError::Parse(format!(
            "{msg} at offset {} in `{}`",
            self.pos,
            String::from_utf8_lossy(self.src)
        ))
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

    fn expr(&mut self) -> Result<LaurentPoly, ArithError> {
        let n = self.ring.nvars();
        let mut acc = LaurentPoly::zero(n);
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            None => return Err(self.err("empty polynomial")),
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { &acc - &t } else { &acc + &t };
            match self.peek() {
                None => return Ok(acc),
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                Some(_) => return Err(self.err("expected `+` or `-`")),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<LaurentPoly, ArithError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap()
    }

    fn factor(&mut self) -> Result<LaurentPoly, ArithError> {
        let n = self.ring.nvars();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.digits().to_string();
                let text = if self.src.get(self.pos) == Some(&b'/') {
                    self.pos += 1;
                    let den = self.digits();
                    if den.is_empty() {
                        return Err(self.err("missing denominator"));
                    }
                    format!("{num}/{den}")
                } else {
                    num
                };
                Ok(LaurentPoly::constant(n, parse_rational(&text)?))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let var = self
                    .ring
                    .vars
                    .iter()
                    .position(|v| v.name == name)
                    .ok_or_else(|| ArithError::Parse(format!("unknown variable `{name}`")))?;
                let mut power = 1i32;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let paren = self.peek() == Some(b'(');
                    if paren {
                        self.pos += 1;
                    }
                    let neg = self.peek() == Some(b'-');
                    if neg {
                        self.pos += 1;
                    }
                    self.skip_ws();
                    let d = self.digits();
                    power = d.parse().map_err(|_| self.err("invalid exponent"))?;
                    if neg {
                        power = -power;
                    }
                    if paren {
                        if self.peek() != Some(b')') {
                            return Err(self.err("expected `)`"));
                        }
                        self.pos += 1;
                    }
                }
                Ok(LaurentPoly::monomial(Rational::one(), ExponentVector::unit(n, var, power)))
            }
            _ => Err(self.err("expected a number or variable")),
        }
    }
}
