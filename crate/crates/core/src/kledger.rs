//! Formal ledger of connection classes: integer combinations of atoms that carry a
//! rank, a first-Chern-class representative and a scalar-curvature flag.
//!
//! Atoms are free generators; no relations between connections are imposed.

use std::collections::BTreeMap;

use num_traits::One;
use serde_json::Value;

use crate::arith::{Rational, Ring};
use crate::cochain::{class_equal, Cochain, EvenClassPolynomial};
use crate::error::{Error, Result};
use crate::lralg::LieRinehart;
use crate::vki;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KAtom {
    pub rank: u64,
    pub c1: Cochain,
    /// Curvature is `(c1/rank)·Id`.
    pub scalar_type: bool,
    /// Sorted labels of the tensor factors; empty for the unit.
    pub factors: Vec<String>,
}

impl KAtom {
    /// The trivial flat line, unit for the tensor product.
    pub fn trivial(l: usize, nvars: usize) -> Self {
        KAtom { rank: 1, c1: Cochain::zero(2, l, nvars), scalar_type: true, factors: Vec::new() }
    }

    pub fn new(rank: u64, c1: Cochain, scalar_type: bool, label: impl Into<String>) -> Self {
        assert!(rank >= 1, "atoms have positive rank");
        assert_eq!(c1.degree(), 2, "c1 is a 2-form");
        KAtom { rank, c1, scalar_type, factors: vec![label.into()] }
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn label(&self) -> String {
        if self.factors.is_empty() {
            "1".into()
        } else {
            self.factors.join("⊗")
        }
    }

    /// Rank multiplies; `c1 = r'·c1 + r·c1'`.
    pub fn tensor(&self, other: &KAtom) -> KAtom {
        let r = Rational::from_integer(self.rank.into());
        let r2 = Rational::from_integer(other.rank.into());
        let mut factors: Vec<String> = self.factors.iter().chain(&other.factors).cloned().collect();
        factors.sort();
        KAtom {
            rank: self.rank * other.rank,
            c1: self.c1.scale(&r2).add(&other.c1.scale(&r)),
            scalar_type: self.scalar_type && other.scalar_type,
            factors,
        }
    }

    /// `1 − r + r·exp(c1/r)`.
    pub fn character(&self) -> Result<EvenClassPolynomial> {
        if !self.scalar_type {
            return Err(Error::Unsupported(format!(
                "character of non-scalar atom `{}` needs full curvature data",
                self.label()
            )));
        }
        let r = Rational::from_integer(self.rank.into());
        let l = self.c1.rank();
        let n = self.c1.nvars();
        Ok(EvenClassPolynomial::constant(l, n, Rational::one() - &r)
            .add(&EvenClassPolynomial::exp(&self.c1.scale(&r.recip())).scale(&r)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KClass {
    l: usize,
    nvars: usize,
    terms: BTreeMap<KAtom, i64>,
}

impl KClass {
    pub fn zero(l: usize, nvars: usize) -> Self {
        KClass { l, nvars, terms: BTreeMap::new() }
    }

    pub fn one(l: usize, nvars: usize) -> Self {
        Self::atom(KAtom::trivial(l, nvars))
    }

    pub fn atom(a: KAtom) -> Self {
        let mut k = KClass::zero(a.c1.rank(), a.c1.nvars());
        k.add_atom(a, 1);
        k
    }

    pub fn terms(&self) -> impl Iterator<Item = (&KAtom, &i64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The single atom of a class `1·a`.
    pub fn as_atom(&self) -> Option<&KAtom> {
        match self.terms.iter().next() {
            Some((a, 1)) if self.terms.len() == 1 => Some(a),
            _ => None,
        }
    }

    fn add_atom(&mut self, a: KAtom, m: i64) {
        let cur = self.terms.get(&a).copied().unwrap_or(0) + m;
        if cur == 0 {
            self.terms.remove(&a);
        } else {
            self.terms.insert(a, cur);
        }
    }

    pub fn add(&self, other: &KClass) -> KClass {
        let mut out = self.clone();
        for (a, m) in &other.terms {
            out.add_atom(a.clone(), *m);
        }
        out
    }

    pub fn neg(&self) -> KClass {
        KClass { l: self.l, nvars: self.nvars, terms: self.terms.iter().map(|(a, m)| (a.clone(), -m)).collect() }
    }

    pub fn sub(&self, other: &KClass) -> KClass {
        self.add(&other.neg())
    }

    pub fn times(&self, n: i64) -> KClass {
        let mut out = KClass::zero(self.l, self.nvars);
        for (a, m) in &self.terms {
            out.add_atom(a.clone(), m * n);
        }
        out
    }

    pub fn tensor(&self, other: &KClass) -> KClass {
        let mut out = KClass::zero(self.l, self.nvars);
        for (a, m) in &self.terms {
            for (b, n) in &other.terms {
                out.add_atom(a.tensor(b), m * n);
            }
        }
        out
    }

    /// `Σ mult · rank`.
    pub fn rank(&self) -> i64 {
        self.terms.iter().map(|(a, m)| m * a.rank as i64).sum()
    }

    pub fn c1(&self) -> Cochain {
        self.terms.iter().fold(Cochain::zero(2, self.l, self.nvars), |acc, (a, m)| {
            acc.add(&a.c1.scale(&Rational::from_integer((*m).into())))
        })
    }

    pub fn ch(&self) -> Result<EvenClassPolynomial> {
        let mut out = EvenClassPolynomial::zero(self.l, self.nvars);
        for (a, m) in &self.terms {
            out = out.add(&a.character()?.scale(&Rational::from_integer((*m).into())));
        }
        Ok(out)
    }

    pub fn to_json(&self, ring: &Ring) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(a, m)| {
                    serde_json::json!({
                        "label": a.label(),
                        "rank": a.rank,
                        "c1": a.c1.to_json(ring),
                        "scalar_type": a.scalar_type,
                        "mult": m,
                    })
                })
                .collect(),
        )
    }
}

pub fn k_add(u: &KClass, v: &KClass) -> KClass {
    u.add(v)
}

pub fn k_neg(u: &KClass) -> KClass {
    u.neg()
}

pub fn k_tensor(u: &KClass, v: &KClass) -> KClass {
    u.tensor(v)
}

pub fn k_c1(u: &KClass) -> Cochain {
    u.c1()
}

pub fn k_ch(u: &KClass) -> Result<EvenClassPolynomial> {
    u.ch()
}

/// Inputs for the kernel constructions: classes `F_m` with their `(k_m, i_m)` and the balancing pair.
#[derive(Clone, Debug)]
pub struct KernelInput {
    pub classes: Vec<Cochain>,
    pub ks: Vec<usize>,
    pub is: Vec<usize>,
    pub balance: (usize, usize),
}

impl KernelInput {
    fn validate(&self, lr: &LieRinehart) -> Result<()> {
        let n = self.classes.len();
        if n == 0 || self.ks.len() != n || self.is.len() != n {
            return Err(Error::InvalidArgument(format!(
                "need equally long nonempty class, k and i lists, got {}, {}, {}",
                n,
                self.ks.len(),
                self.is.len()
            )));
        }
        for (m, f) in self.classes.iter().enumerate() {
            if f.degree() != 2 || f.rank() != lr.rank() || f.nvars() != lr.nvars() {
                return Err(Error::InvalidArgument(format!("class {} is not a 2-cochain on this algebra", m + 1)));
            }
            if !f.is_cocycle(lr) {
                return Err(Error::NotCocycle(format!("class {}", m + 1)));
            }
        }
        Ok(())
    }

    fn balancing_class(&self) -> Cochain {
        let first = &self.classes[0];
        self.classes.iter().skip(1).fold(first.clone(), |acc, f| acc.add(f)).neg()
    }

    fn degenerate(&self) -> bool {
        self.classes.iter().all(Cochain::is_zero)
    }

    /// The line atoms `L^{k_m,i_m}(F_m)` followed by the balancing line.
    fn lines(&self, lr: &LieRinehart) -> Result<Vec<KAtom>> {
        let mut out = Vec::with_capacity(self.classes.len() + 1);
        for ((f, &k), &i) in self.classes.iter().zip(&self.ks).zip(&self.is) {
            out.push(vki::line_atom(lr, f, k, i)?);
        }
        out.push(vki::line_atom(lr, &self.balancing_class(), self.balance.0, self.balance.1)?);
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct EtaReport {
    /// `η − 1`.
    pub element: KClass,
    pub character: EvenClassPolynomial,
    /// `Ch(η − 1) = 0` in every degree.
    pub character_vanishes: bool,
    /// `Ch(η − 1)` vanishes in positive degrees.
    pub positive_degrees_vanish: bool,
    pub formally_nonzero: bool,
    pub degenerate: bool,
}

#[derive(Clone, Debug)]
pub struct OmegaReport {
    pub element: KClass,
    pub c1: Cochain,
    pub c1_vanishes: bool,
    /// `ω` differs from the unit as a formal product.
    pub formally_nontrivial: bool,
    pub degenerate: bool,
}

/// `η − 1` with `η = Σ_m L^{k_m,i_m}(F_m) + L^{k_0,i_0}(−Σ F_m)`.
pub fn kernel_eta(lr: &LieRinehart, input: &KernelInput) -> Result<EtaReport> {
    input.validate(lr)?;
    let eta = input.lines(lr)?.into_iter().fold(KClass::zero(lr.rank(), lr.nvars()), |acc, a| acc.add(&KClass::atom(a)));
    let element = eta.sub(&KClass::one(lr.rank(), lr.nvars()));
    let character = element.ch()?;
    Ok(EtaReport {
        character_vanishes: character.is_zero(),
        positive_degrees_vanish: character.components().iter().skip(1).all(Cochain::is_zero),
        formally_nonzero: !element.is_zero(),
        degenerate: input.degenerate(),
        element,
        character,
    })
}

/// `ω = L^{k_1,i_1}(F_1) ⊗ ⋯ ⊗ L^{k_0,i_0}(−Σ F_m)`.
pub fn kernel_omega(lr: &LieRinehart, input: &KernelInput, window: u32) -> Result<OmegaReport> {
    input.validate(lr)?;
    let element = input
        .lines(lr)?
        .into_iter()
        .fold(KClass::one(lr.rank(), lr.nvars()), |acc, a| acc.tensor(&KClass::atom(a)));
    let c1 = element.c1();
    let zero = Cochain::zero(2, lr.rank(), lr.nvars());
    Ok(OmegaReport {
        c1_vanishes: class_equal(lr, &c1, &zero, window)?,
        formally_nontrivial: element != KClass::one(lr.rank(), lr.nvars()),
        degenerate: input.degenerate(),
        element,
        c1,
    })
}

impl EtaReport {
    pub fn to_json(&self, ring: &Ring) -> Value {
        serde_json::json!({
            "ledger": self.element.to_json(ring),
            "ch": self.character.to_json(ring),
            "ch_vanishes": self.character_vanishes,
            "ch_positive_degrees_vanish": self.positive_degrees_vanish,
            "formally_nonzero": self.formally_nonzero,
            "degenerate": self.degenerate,
        })
    }
}

impl OmegaReport {
    pub fn to_json(&self, ring: &Ring) -> Value {
        serde_json::json!({
            "ledger": self.element.to_json(ring),
            "c1": self.c1.to_json(ring),
            "c1_vanishes": self.c1_vanishes,
            "formally_nontrivial": self.formally_nontrivial,
            "degenerate": self.degenerate,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, ratio};
    use crate::arith::LaurentPoly;

    fn f_tor() -> Cochain {
        Cochain::constant_pair(2, 2, 0, 1, int(1))
    }

    fn atom(rank: u64, q: Rational, label: &str) -> KAtom {
        KAtom::new(rank, f_tor().scale(&q), true, label)
    }

    #[test]
    fn group_laws() {
        let u = KClass::atom(atom(2, int(1), "a"));
        assert!(u.add(&u.neg()).is_zero());
        let twice = u.add(&u);
        assert_eq!(twice.terms().next().unwrap().1, &2);
        assert_eq!(KClass::zero(2, 2).add(&u), u);
        assert_eq!(u.tensor(&KClass::one(2, 2)), u);
    }

    #[test]
    fn tensor_rule() {
        let a = atom(1, int(1), "a");
        let b = atom(1, int(3), "b");
        assert_eq!(a.tensor(&b).c1, f_tor().scale(&int(4)));
        let g = atom(2, int(1), "g");
        let h = atom(3, ratio(1, 2), "h");
        let gh = g.tensor(&h);
        assert_eq!(gh.rank, 6);
        assert_eq!(gh.c1, f_tor().scale(&(int(3) + ratio(1, 2) * int(2))));
        assert_eq!(gh.factors, vec!["g".to_string(), "h".to_string()]);
        let ns = KAtom { scalar_type: false, ..g.clone() };
        assert!(!ns.tensor(&h).scalar_type);
    }

    #[test]
    fn characters() {
        let flat = KAtom::new(4, Cochain::zero(2, 2, 2), true, "flat");
        assert_eq!(KClass::atom(flat).ch().unwrap(), EvenClassPolynomial::one(2, 2));
        let g = atom(3, int(1), "g");
        let ch = g.character().unwrap();
        assert_eq!(ch.component(0).get(&[]), LaurentPoly::one(2));
        assert_eq!(ch.component(1), &f_tor());
        let ns = KAtom { scalar_type: false, ..g };
        assert!(matches!(KClass::atom(ns).ch(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn c1_is_additive() {
        let u = KClass::atom(atom(2, int(1), "a")).add(&KClass::atom(atom(1, int(2), "b")).times(3));
        assert_eq!(u.c1(), f_tor().scale(&int(7)));
        assert!(KClass::zero(2, 2).c1().is_zero());
    }

    #[test]
    fn kernel_elements_on_torus() {
        let t = LieRinehart::torus(2).unwrap();
        let input = KernelInput { classes: vec![f_tor()], ks: vec![1], is: vec![2], balance: (2, 1) };
        let eta = kernel_eta(&t, &input).unwrap();
        assert!(eta.formally_nonzero);
        assert!(eta.positive_degrees_vanish);
        // the character is additive: one unit line per summand survives in degree 0
        assert_eq!(eta.character.component(0).get(&[]), LaurentPoly::one(2));
        assert!(!eta.character_vanishes);
        let omega = kernel_omega(&t, &input, 2).unwrap();
        assert!(omega.c1_vanishes);
        assert!(omega.c1.is_zero());
        assert!(omega.formally_nontrivial);
        assert!(!omega.degenerate);
    }

    #[test]
    fn kernel_rejects_bad_input() {
        let t = LieRinehart::torus(3).unwrap();
        let bad = Cochain::from_values(2, 3, 3, [(vec![0, 1], t.ring().var(2))]);
        let input = KernelInput { classes: vec![bad], ks: vec![1], is: vec![1], balance: (1, 1) };
        assert!(matches!(kernel_eta(&t, &input), Err(Error::NotCocycle(_))));
        let short = KernelInput { classes: vec![], ks: vec![], is: vec![], balance: (1, 1) };
        assert!(kernel_eta(&t, &short).is_err());
    }
}
