//! PBW rewriting for twisted enveloping algebras `U(A, L, f)` and their central form.
//!
//! Relations, with coefficients always moved to the left:
//!
//! * `e_i · a = a · e_i + α(e_i)(a)`
//! * `e_j · e_i = e_i · e_j + [e_j, e_i] + f(e_j, e_i) · z` for `j > i`
//!
//! In twisted mode `z = 1`; in central mode `z` is a central generator with its own exponent.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::arith::{LaurentPoly, Rational, Ring};
use crate::cochain::Cochain;
use crate::error::{Error, Result};
use crate::lralg::LieRinehart;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Twisted,
    Central,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "twisted" => Ok(Mode::Twisted),
            "central" => Ok(Mode::Central),
            _ => Err(Error::InvalidArgument(format!("unknown mode `{s}`"))),
        }
    }
}

/// How a word is brought to normal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Multiply into an already-normal tail from the right, one letter at a time.
    #[default]
    Nested,
    /// Rewrite the leftmost redex of the literal word until none remains.
    Leftmost,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nested" => Ok(Strategy::Nested),
            "leftmost" => Ok(Strategy::Leftmost),
            _ => Err(Error::InvalidArgument(format!("unknown strategy `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Token {
    Coef(LaurentPoly),
    /// 0-based generator index.
    Gen(usize),
    Z,
}

impl Token {
    pub fn to_json(&self, ring: &Ring) -> Value {
        match self {
            Token::Coef(a) => serde_json::json!({ "coef": ring.format(a) }),
            Token::Gen(i) => serde_json::json!({ "gen": i + 1 }),
            Token::Z => serde_json::json!({ "z": 1 }),
        }
    }

    pub fn from_json(v: &Value, ring: &Ring, rank: usize) -> Result<Token> {
        let obj = v.as_object().filter(|o| o.len() == 1).ok_or_else(|| {
            Error::Schema(format!("token must be a one-key object, got {v}"))
        })?;
        let (k, val) = obj.iter().next().unwrap();
        match k.as_str() {
            "coef" => {
                let s = val.as_str().ok_or_else(|| Error::Schema("`coef` must be a string".into()))?;
                Ok(Token::Coef(ring.parse(s)?))
            }
            "gen" => match val.as_u64() {
                Some(i) if i >= 1 && (i as usize) <= rank => Ok(Token::Gen(i as usize - 1)),
                _ => Err(Error::Schema(format!("generator index {val} outside 1..={rank}"))),
            },
            "z" if val.as_u64() == Some(1) => Ok(Token::Z),
            _ => Err(Error::Schema(format!("unknown token `{k}`"))),
        }
    }
}

pub fn word_from_json(v: &Value, ring: &Ring, rank: usize) -> Result<Vec<Token>> {
    v.as_array()
        .ok_or_else(|| Error::Schema("word must be an array of tokens".into()))?
        .iter()
        .map(|t| Token::from_json(t, ring, rank))
        .collect()
}

pub fn format_word(word: &[Token], ring: &Ring) -> String {
    if word.is_empty() {
        return "1".into();
    }
    word.iter()
        .map(|t| match t {
            Token::Coef(a) => format!("({})", ring.format(a)),
            Token::Gen(i) => format!("e{}", i + 1),
            Token::Z => "z".into(),
        })
        .collect::<Vec<_>>()
        .join("·")
}

/// `z^z · e_1^{p_1} ⋯ e_l^{p_l}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PbwMonomial {
    pub z: u32,
    pub exps: Vec<u32>,
}

impl PbwMonomial {
    pub fn one(rank: usize) -> Self {
        PbwMonomial { z: 0, exps: vec![0; rank] }
    }

    pub fn new(exps: Vec<u32>) -> Self {
        PbwMonomial { z: 0, exps }
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    /// JSON key: `"p1,...,pl"`, with `"|k"` appended when the `z`-exponent is positive.
    pub fn key(&self) -> String {
        let base = self.exps.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        if self.z > 0 {
            format!("{base}|{}", self.z)
        } else {
            base
        }
    }

    pub fn parse_key(key: &str, rank: usize) -> Result<Self> {
        let bad = || Error::Schema(format!("bad monomial key `{key}`"));
        let (base, z) = match key.split_once('|') {
            Some((b, z)) => (b, z.trim().parse::<u32>().map_err(|_| bad())?),
            None => (key, 0),
        };
        let exps: Vec<u32> = if base.trim().is_empty() {
            Vec::new()
        } else {
            base.split(',').map(|s| s.trim().parse::<u32>().map_err(|_| bad())).collect::<Result<_>>()?
        };
        if exps.len() != rank {
            return Err(bad());
        }
        Ok(PbwMonomial { z, exps })
    }
}

impl fmt::Display for PbwMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.z > 0 {
            parts.push(if self.z == 1 { "z".to_string() } else { format!("z^{}", self.z) });
        }
        for (i, &p) in self.exps.iter().enumerate() {
            match p {
                0 => {}
                1 => parts.push(format!("e{}", i + 1)),
                _ => parts.push(format!("e{}^{}", i + 1, p)),
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// A left `A`-linear combination of ordered monomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UElement {
    rank: usize,
    nvars: usize,
    terms: BTreeMap<PbwMonomial, LaurentPoly>,
}

impl UElement {
    pub fn zero(rank: usize, nvars: usize) -> Self {
        UElement { rank, nvars, terms: BTreeMap::new() }
    }

    pub fn one(rank: usize, nvars: usize) -> Self {
        Self::term(PbwMonomial::one(rank), LaurentPoly::one(nvars))
    }

    pub fn term(m: PbwMonomial, c: LaurentPoly) -> Self {
        let mut u = UElement::zero(m.exps.len(), c.nvars());
        u.add_term(m, c);
        u
    }

    pub fn constant(rank: usize, c: LaurentPoly) -> Self {
        Self::term(PbwMonomial::one(rank), c)
    }

    pub fn rank(&self) -> usize {
        self.rank
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

    pub fn terms(&self) -> impl Iterator<Item = (&PbwMonomial, &LaurentPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &PbwMonomial) -> LaurentPoly {
        self.terms.get(m).cloned().unwrap_or_else(|| LaurentPoly::zero(self.nvars))
    }

    pub fn add_term(&mut self, m: PbwMonomial, c: LaurentPoly) {
        assert_eq!(m.exps.len(), self.rank, "monomial rank mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(cur) => {
                *cur = &*cur + &c;
                if cur.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add_assign(&mut self, other: &UElement) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &UElement) -> UElement {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &UElement) -> UElement {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, q: &Rational) -> UElement {
        self.left_coef(&LaurentPoly::constant(self.nvars, q.clone()))
    }

    /// `a · u`; coefficients sit on the left so this is coefficientwise.
    pub fn left_coef(&self, a: &LaurentPoly) -> UElement {
        let mut out = UElement::zero(self.rank, self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), a * c);
        }
        out
    }

    /// Highest `|P|` among the terms, `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(PbwMonomial::degree).max()
    }

    /// Highest `2·z + |P|` among the terms.
    pub fn central_weight(&self) -> Option<u32> {
        self.terms.keys().map(|m| 2 * m.z + m.degree()).max()
    }

    /// Terms of maximal degree.
    pub fn top_part(&self) -> UElement {
        let mut out = UElement::zero(self.rank, self.nvars);
        if let Some(d) = self.degree() {
            for (m, c) in &self.terms {
                if m.degree() == d {
                    out.add_term(m.clone(), c.clone());
                }
            }
        }
        out
    }

    /// Sets `z = 1`.
    pub fn specialize_z(&self) -> UElement {
        let mut out = UElement::zero(self.rank, self.nvars);
        for (m, c) in &self.terms {
            out.add_term(PbwMonomial { z: 0, exps: m.exps.clone() }, c.clone());
        }
        out
    }

    /// Keeps terms with `lo ≤ |P| < hi`.
    pub fn degree_window(&self, lo: u32, hi: u32) -> UElement {
        let mut out = UElement::zero(self.rank, self.nvars);
        for (m, c) in &self.terms {
            if (lo..hi).contains(&m.degree()) {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    pub fn to_json(&self, ring: &Ring) -> Value {
        let mut map = Map::new();
        for (m, c) in &self.terms {
            map.insert(m.key(), Value::String(ring.format(c)));
        }
        Value::Object(map)
    }

    pub fn from_json(v: &Value, ring: &Ring, rank: usize) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Schema("element must be an object".into()))?;
        let mut out = UElement::zero(rank, ring.nvars());
        for (k, val) in obj {
            let s = val.as_str().ok_or_else(|| Error::Schema(format!("coefficient of `{k}` must be a string")))?;
            out.add_term(PbwMonomial::parse_key(k, rank)?, ring.parse(s)?);
        }
        Ok(out)
    }

    pub fn format(&self, ring: &Ring) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(m, _)| std::cmp::Reverse(2 * m.z + m.degree()));
        let mut out = String::new();
        for (idx, (m, c)) in terms.into_iter().enumerate() {
            // Single negative terms print as a subtraction.
            let neg = c.len() == 1 && ring.format(c).starts_with('-');
            let coef = if neg { ring.format(&-c) } else { ring.format(c) };
            let unit = m == &PbwMonomial::one(self.rank);
            let body = match (unit, coef.as_str()) {
                (true, _) => coef,
                (false, "1") => m.to_string(),
                (false, _) if c.len() == 1 => format!("{coef}*{m}"),
                _ => format!("({coef})*{m}"),
            };
            match (idx, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            out.push_str(&body);
        }
        out
    }
}

/// A word with a left coefficient, as manipulated by literal rewriting.
pub type WordTerm = (LaurentPoly, Vec<Token>);

#[derive(Clone, Debug)]
pub struct RewriteSystem {
    lr: LieRinehart,
    f: Cochain,
    mode: Mode,
}

impl RewriteSystem {
    /// `f` need not be a cocycle; confluence is then reported by [`RewriteSystem::diamond_check`].
    pub fn new(lr: LieRinehart, f: Cochain, mode: Mode) -> Result<Self> {
        if f.degree() != 2 || f.rank() != lr.rank() || f.nvars() != lr.nvars() {
            return Err(Error::InvalidArgument(format!(
                "twist must be a 2-cochain on rank {}, got degree {} rank {}",
                lr.rank(),
                f.degree(),
                f.rank()
            )));
        }
        Ok(RewriteSystem { lr, f, mode })
    }

    /// Untwisted `U(A, L)`.
    pub fn untwisted(lr: LieRinehart) -> Self {
        let f = Cochain::zero(2, lr.rank(), lr.nvars());
        RewriteSystem { lr, f, mode: Mode::Twisted }
    }

    pub fn lie_rinehart(&self) -> &LieRinehart {
        &self.lr
    }

    pub fn twist(&self) -> &Cochain {
        &self.f
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn rank(&self) -> usize {
        self.lr.rank()
    }

    pub fn ring(&self) -> &Ring {
        self.lr.ring()
    }

    pub fn one(&self) -> UElement {
        UElement::one(self.rank(), self.lr.nvars())
    }

    pub fn zero(&self) -> UElement {
        UElement::zero(self.rank(), self.lr.nvars())
    }

    pub fn generator(&self, i: usize) -> UElement {
        let mut m = PbwMonomial::one(self.rank());
        m.exps[i] = 1;
        UElement::term(m, LaurentPoly::one(self.lr.nvars()))
    }

    pub fn monomial(&self, exps: &[u32]) -> UElement {
        UElement::term(PbwMonomial::new(exps.to_vec()), LaurentPoly::one(self.lr.nvars()))
    }

    fn z_shift(&self, m: &mut PbwMonomial) {
        if self.mode == Mode::Central {
            m.z += 1;
        }
    }

    /// `e_i · e^P` for a bare ordered monomial (`z`-exponent carried through).
    fn gen_times_monomial(&self, i: usize, mono: &PbwMonomial) -> UElement {
        let nv = self.lr.nvars();
        let first = mono.exps.iter().position(|&p| p > 0);
        match first {
            Some(m) if m < i => {
                let mut rest = mono.clone();
                rest.exps[m] -= 1;
                // e_i e_m = e_m e_i + [e_i, e_m] + f(e_i, e_m) z
                let mut out = self.left_mul_gen(m, &self.gen_times_monomial(i, &rest));
                for (k, c) in self.lr.basis_bracket(i, m).coords().iter().enumerate() {
                    if !c.is_zero() {
                        out.add_assign(&self.gen_times_monomial(k, &rest).left_coef(c));
                    }
                }
                let fim = self.f.eval(&[i, m]);
                if !fim.is_zero() {
                    let mut shifted = rest;
                    self.z_shift(&mut shifted);
                    out.add_term(shifted, fim);
                }
                out
            }
            _ => {
                let mut next = mono.clone();
                next.exps[i] += 1;
                UElement::term(next, LaurentPoly::one(nv))
            }
        }
    }

    /// `e_i · u` for `u` in normal form.
    pub fn left_mul_gen(&self, i: usize, u: &UElement) -> UElement {
        let mut out = self.zero();
        for (m, c) in u.terms() {
            out.add_assign(&self.gen_times_monomial(i, m).left_coef(c));
            let dc = self.lr.derivation(i, c);
            if !dc.is_zero() {
                out.add_term(m.clone(), dc);
            }
        }
        out
    }

    /// `z · u`; identity in twisted mode.
    pub fn left_mul_z(&self, u: &UElement) -> UElement {
        if self.mode == Mode::Twisted {
            return u.clone();
        }
        let mut out = self.zero();
        for (m, c) in u.terms() {
            let mut m = m.clone();
            m.z += 1;
            out.add_term(m, c.clone());
        }
        out
    }

    fn apply_token(&self, t: &Token, u: &UElement) -> UElement {
        match t {
            Token::Coef(a) => u.left_coef(a),
            Token::Gen(i) => self.left_mul_gen(*i, u),
            Token::Z => self.left_mul_z(u),
        }
    }

    fn check_word(&self, word: &[Token]) {
        for t in word {
            match t {
                Token::Gen(i) => assert!(*i < self.rank(), "generator e{} out of range", i + 1),
                Token::Coef(a) => assert_eq!(a.nvars(), self.lr.nvars(), "coefficient ring mismatch"),
                Token::Z => {}
            }
        }
    }

    pub fn normal_form(&self, word: &[Token]) -> UElement {
        self.normal_form_with(word, Strategy::Nested)
    }

    pub fn normal_form_with(&self, word: &[Token], strategy: Strategy) -> UElement {
        self.check_word(word);
        match strategy {
            Strategy::Nested => word.iter().rev().fold(self.one(), |acc, t| self.apply_token(t, &acc)),
            Strategy::Leftmost => self.leftmost_normal_form(vec![(LaurentPoly::one(self.lr.nvars()), word.to_vec())]),
        }
    }

    /// Normal form of a linear combination of words.
    pub fn normal_form_terms(&self, terms: &[WordTerm], strategy: Strategy) -> UElement {
        let mut out = self.zero();
        for (c, w) in terms {
            out.add_assign(&self.normal_form_with(w, strategy).left_coef(c));
        }
        out
    }

    /// Word spelling a normal-form term: `c · z^k · e_1^{p_1} ⋯`.
    pub fn spell(m: &PbwMonomial, c: &LaurentPoly) -> Vec<Token> {
        let mut w = vec![Token::Coef(c.clone())];
        w.extend(std::iter::repeat_n(Token::Z, m.z as usize));
        for (i, &p) in m.exps.iter().enumerate() {
            w.extend(std::iter::repeat_n(Token::Gen(i), p as usize));
        }
        w
    }

    /// Product in the algebra: concatenate and normalize.
    pub fn u_mul(&self, u: &UElement, v: &UElement) -> UElement {
        let mut out = self.zero();
        for (m, c) in u.terms() {
            let word = Self::spell(m, c);
            out.add_assign(&word.iter().rev().fold(v.clone(), |acc, t| self.apply_token(t, &acc)));
        }
        out
    }

    /// Applies the single rule whose redex starts at `pos`; `None` if there is no redex there.
    pub fn rewrite_at(&self, word: &[Token], pos: usize) -> Option<Vec<WordTerm>> {
        let nv = self.lr.nvars();
        let one = LaurentPoly::one(nv);
        if self.mode == Mode::Twisted {
            if let Some(Token::Z) = word.get(pos) {
                let mut w = word.to_vec();
                w.remove(pos);
                return Some(vec![(one, w)]);
            }
        }
        let (x, y) = (word.get(pos)?, word.get(pos + 1)?);
        let splice = |mid: Vec<Token>| -> Vec<Token> {
            let mut w = word[..pos].to_vec();
            w.extend(mid);
            w.extend_from_slice(&word[pos + 2..]);
            w
        };
        let out = match (x, y) {
            (Token::Coef(a), Token::Coef(b)) => vec![(one, splice(vec![Token::Coef(a * b)]))],
            (Token::Gen(i), Token::Coef(a)) => vec![
                (one.clone(), splice(vec![Token::Coef(a.clone()), Token::Gen(*i)])),
                (one, splice(vec![Token::Coef(self.lr.derivation(*i, a))])),
            ],
            (Token::Gen(j), Token::Gen(i)) if j > i => {
                let mut terms = vec![(one.clone(), splice(vec![Token::Gen(*i), Token::Gen(*j)]))];
                for (k, c) in self.lr.basis_bracket(*j, *i).coords().iter().enumerate() {
                    if !c.is_zero() {
                        terms.push((one.clone(), splice(vec![Token::Coef(c.clone()), Token::Gen(k)])));
                    }
                }
                let f = self.f.eval(&[*j, *i]);
                if !f.is_zero() {
                    let mid = match self.mode {
                        Mode::Central => vec![Token::Coef(f), Token::Z],
                        Mode::Twisted => vec![Token::Coef(f)],
                    };
                    terms.push((one, splice(mid)));
                }
                terms
            }
            (Token::Gen(_), Token::Z) | (Token::Z, Token::Coef(_)) => {
                vec![(one, splice(vec![y.clone(), x.clone()]))]
            }
            _ => return None,
        };
        Some(out)
    }

    fn leftmost_normal_form(&self, start: Vec<WordTerm>) -> UElement {
        let mut out = self.zero();
        let mut stack = start;
        while let Some((mut c, mut w)) = stack.pop() {
            while let Some(Token::Coef(a)) = w.first() {
                c = &c * a;
                w.remove(0);
            }
            if c.is_zero() {
                continue;
            }
            match (0..w.len()).find_map(|p| self.rewrite_at(&w, p)) {
                Some(terms) => stack.extend(terms.into_iter().map(|(c2, w2)| (&c * &c2, w2))),
                None => {
                    let mut m = PbwMonomial::one(self.rank());
                    for t in &w {
                        match t {
                            Token::Z => m.z += 1,
                            Token::Gen(i) => m.exps[*i] += 1,
                            Token::Coef(_) => unreachable!("coefficient letter left in an irreducible word"),
                        }
                    }
                    out.add_term(m, c);
                }
            }
        }
        out
    }

    /// Resolves every overlap ambiguity both ways.
    pub fn diamond_check(&self) -> ConfluenceReport {
        let l = self.rank();
        let mut entries = Vec::new();
        let gens = self.ring().generators();
        let mut probe = |kind: OverlapKind, word: Vec<Token>| {
            let first = self.rewrite_at(&word, 0).expect("overlap starts with a redex");
            let second = self.rewrite_at(&word, 1).expect("overlap continues with a redex");
            let left = self.normal_form_terms(&first, Strategy::Nested);
            let right = self.normal_form_terms(&second, Strategy::Nested);
            let discrepancy = left.sub(&right);
            entries.push(OverlapEntry { kind, word, left, right, resolved: discrepancy.is_zero(), discrepancy });
        };
        for k in 0..l {
            for j in 0..k {
                for i in 0..j {
                    probe(OverlapKind::Triple, vec![Token::Gen(k), Token::Gen(j), Token::Gen(i)]);
                }
            }
        }
        for j in 0..l {
            for i in 0..j {
                for a in &gens {
                    probe(OverlapKind::SwapCoefficient, vec![Token::Gen(j), Token::Gen(i), Token::Coef(a.clone())]);
                }
            }
        }
        for i in 0..l {
            for a in &gens {
                for b in &gens {
                    probe(
                        OverlapKind::CoefficientPair,
                        vec![Token::Gen(i), Token::Coef(a.clone()), Token::Coef(b.clone())],
                    );
                }
            }
        }
        let resolvable = entries.iter().all(|e| e.resolved);
        ConfluenceReport { entries, resolvable }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OverlapKind {
    /// `e_k e_j e_i`, `k > j > i`
    Triple,
    /// `e_j e_i a`, `j > i`
    SwapCoefficient,
    /// `e_i a b`
    CoefficientPair,
}

#[derive(Clone, Debug)]
pub struct OverlapEntry {
    pub kind: OverlapKind,
    pub word: Vec<Token>,
    /// Reducing the leftmost redex first.
    pub left: UElement,
    pub right: UElement,
    /// `left − right`.
    pub discrepancy: UElement,
    pub resolved: bool,
}

#[derive(Clone, Debug)]
pub struct ConfluenceReport {
    pub entries: Vec<OverlapEntry>,
    pub resolvable: bool,
}

impl ConfluenceReport {
    pub fn failures(&self) -> impl Iterator<Item = &OverlapEntry> {
        self.entries.iter().filter(|e| !e.resolved)
    }

    pub fn to_json(&self, ring: &Ring) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                serde_json::json!({
                    "kind": e.kind,
                    "word": e.word.iter().map(|t| t.to_json(ring)).collect::<Vec<_>>(),
                    "resolved": e.resolved,
                    "discrepancy": e.discrepancy.to_json(ring),
                })
            })
            .collect();
        serde_json::json!({
            "overlaps": self.entries.len(),
            "failures": self.entries.iter().filter(|e| !e.resolved).count(),
            "resolvable": self.resolvable,
            "entries": entries,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;

    fn coef(lr: &LieRinehart, s: &str) -> Token {
        Token::Coef(lr.ring().parse(s).unwrap())
    }

    fn both(sys: &RewriteSystem, w: &[Token]) -> UElement {
        let a = sys.normal_form_with(w, Strategy::Nested);
        let b = sys.normal_form_with(w, Strategy::Leftmost);
        assert_eq!(a, b, "strategies disagree on {}", format_word(w, sys.ring()));
        a
    }

    fn lambda_system(mode: Mode) -> RewriteSystem {
        let lr = LieRinehart::point_abelian(2).unwrap();
        let f = Cochain::constant_pair(2, 0, 0, 1, int(5));
        RewriteSystem::new(lr, f, mode).unwrap()
    }

    #[test]
    fn derivation_rule_on_affine_line() {
        let sys = RewriteSystem::untwisted(LieRinehart::affine(1).unwrap());
        let x = coef(sys.lie_rinehart(), "x");
        let u = both(&sys, &[Token::Gen(0), x.clone()]);
        assert_eq!(u.format(sys.ring()), "x*e1 + 1");
        let u = both(&sys, &[Token::Gen(0), Token::Gen(0), x]);
        let r = sys.ring();
        assert_eq!(u.coefficient(&PbwMonomial::new(vec![2])), r.var(0));
        assert_eq!(u.coefficient(&PbwMonomial::new(vec![1])), LaurentPoly::from_int(1, 2));
        assert_eq!(u.len(), 2);
    }

    #[test]
    fn twisted_swap_on_point() {
        let sys = lambda_system(Mode::Twisted);
        let u = both(&sys, &[Token::Gen(1), Token::Gen(0)]);
        let mut expected = sys.monomial(&[1, 1]);
        expected.add_term(PbwMonomial::one(2), LaurentPoly::from_int(0, -5));
        assert_eq!(u, expected);
        let comm = sys
            .u_mul(&sys.generator(0), &sys.generator(1))
            .sub(&sys.u_mul(&sys.generator(1), &sys.generator(0)));
        assert_eq!(comm, UElement::constant(2, LaurentPoly::from_int(0, 5)));
    }

    #[test]
    fn central_mode_keeps_z() {
        let sys = lambda_system(Mode::Central);
        let u = both(&sys, &[Token::Gen(1), Token::Gen(0)]);
        let z = PbwMonomial { z: 1, exps: vec![0, 0] };
        assert_eq!(u.coefficient(&z), LaurentPoly::from_int(0, -5));
        assert_eq!(u.specialize_z(), lambda_system(Mode::Twisted).normal_form(&[Token::Gen(1), Token::Gen(0)]));
        let v = UElement::from_json(&u.to_json(sys.ring()), sys.ring(), 2).unwrap();
        assert_eq!(u, v);
    }

    #[test]
    fn affine_commutator() {
        let sys = RewriteSystem::untwisted(LieRinehart::affine(1).unwrap());
        let e = sys.generator(0);
        let xe = e.left_coef(&sys.ring().var(0));
        let c = sys.u_mul(&e, &xe).sub(&sys.u_mul(&xe, &e));
        assert_eq!(c, e);
        assert_eq!(sys.u_mul(&xe, &sys.one()), xe);
    }

    #[test]
    fn degree_windows() {
        let sys = lambda_system(Mode::Twisted);
        let u = sys.one().add(&sys.generator(0)).add(&sys.monomial(&[1, 1]));
        assert_eq!(u.degree_window(1, 2), sys.generator(0));
        assert_eq!(u.degree_window(0, 100), u);
        assert!(u.degree_window(3, 4).is_zero());
    }

    #[test]
    fn overlaps_with_cocycle_twist_resolve() {
        let lr = LieRinehart::torus(3).unwrap();
        let f = Cochain::from_values(
            2,
            3,
            3,
            [
                (vec![0, 1], LaurentPoly::from_int(3, 1)),
                (vec![0, 2], LaurentPoly::from_int(3, -2)),
                (vec![1, 2], LaurentPoly::from_int(3, 4)),
            ],
        );
        let report = RewriteSystem::new(lr, f, Mode::Twisted).unwrap().diamond_check();
        assert!(report.resolvable);
        assert_eq!(report.entries.iter().filter(|e| e.kind == OverlapKind::Triple).count(), 1);
        let affine = RewriteSystem::untwisted(LieRinehart::affine(1).unwrap()).diamond_check();
        assert!(affine.resolvable);
        assert!(affine.entries.iter().all(|e| e.kind == OverlapKind::CoefficientPair));
    }

    #[test]
    fn non_cocycle_twist_breaks_the_triple() {
        let lr = LieRinehart::torus(3).unwrap();
        let x3 = lr.ring().var(2);
        let f = Cochain::from_values(2, 3, 3, [(vec![0, 1], x3.clone())]);
        let df = f.differential(&lr);
        let report = RewriteSystem::new(lr, f, Mode::Twisted).unwrap().diamond_check();
        assert!(!report.resolvable);
        let failures: Vec<_> = report.failures().collect();
        assert_eq!(failures.len(), 1);
        assert_eq!(failures[0].kind, OverlapKind::Triple);
        assert_eq!(failures[0].discrepancy, UElement::constant(3, df.get(&[0, 1, 2])));
        assert_eq!(df.get(&[0, 1, 2]), x3);
    }

    #[test]
    fn token_json() {
        let lr = LieRinehart::torus(2).unwrap();
        let w = vec![Token::Gen(1), coef(&lr, "x^-1 + 2"), Token::Z];
        let v = Value::Array(w.iter().map(|t| t.to_json(lr.ring())).collect());
        assert_eq!(word_from_json(&v, lr.ring(), 2).unwrap(), w);
        assert!(Token::from_json(&serde_json::json!({"gen": 3}), lr.ring(), 2).is_err());
        assert!(Token::from_json(&serde_json::json!({"gen": 1, "z": 1}), lr.ring(), 2).is_err());
    }
}
