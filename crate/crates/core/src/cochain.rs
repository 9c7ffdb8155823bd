//! The Lie–Rinehart cochain complex `Hom_A(Λ^p L, A)`.
//!
//! A p-cochain is stored by its values on strictly increasing basis tuples
//! `(e_{i_1}, …, e_{i_p})`; the alternating A-multilinear extension is implicit.
//! For presentations whose anchor and brackets are multidegree-homogeneous
//! every graded piece of the complex is a finite-dimensional ℚ-vector space,
//! which is what the windowed cohomology routines below work on.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::arith::rational::factorial;
use crate::arith::{ExponentVector, LaurentPoly, QMatrix, Rational, Ring};
use crate::error::{Error, Result};
use crate::lralg::LieRinehart;

/// All strictly increasing `p`-tuples drawn from `0..l`, in lexicographic order.
pub fn sorted_tuples(l: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, l: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..l {
            cur.push(i);
            rec(i + 1, l, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= l {
        rec(0, l, p, &mut Vec::with_capacity(p), &mut out);
    }
    out
}

/// Sorts `idx` and returns the sign of the sorting permutation, or `None` on a repeated index.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut inversions = 0usize;
    for a in 0..idx.len() {
        for b in (a + 1)..idx.len() {
            match idx[a].cmp(&idx[b]) {
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Greater => inversions += 1,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    let mut sorted = idx.to_vec();
    sorted.sort_unstable();
    Some((sorted, if inversions.is_multiple_of(2) { 1 } else { -1 }))
}

pub(crate) fn format_tuple(t: &[usize]) -> String {
    t.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

pub(crate) fn parse_tuple(key: &str, degree: usize, rank: usize) -> Result<Vec<usize>> {
    let bad = || Error::Schema(format!("bad tuple key `{key}` for degree {degree}"));
    let idx: Vec<usize> = if key.trim().is_empty() {
        Vec::new()
    } else {
        key.split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if idx.len() != degree || idx.iter().any(|&i| i == 0 || i > rank) || idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad());
    }
    Ok(idx.into_iter().map(|i| i - 1).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cochain {
    degree: usize,
    rank: usize,
    nvars: usize,
    values: BTreeMap<Vec<usize>, LaurentPoly>,
}

impl Cochain {
    pub fn zero(degree: usize, rank: usize, nvars: usize) -> Self {
        Cochain { degree, rank, nvars, values: BTreeMap::new() }
    }

    /// The degree-0 cochain `a`.
    pub fn scalar(rank: usize, a: LaurentPoly) -> Self {
        let mut c = Cochain::zero(0, rank, a.nvars());
        c.set(vec![], a);
        c
    }

    /// Builds a cochain from values on sorted tuples (0-based); panics on malformed tuples.
    pub fn from_values<I>(degree: usize, rank: usize, nvars: usize, values: I) -> Self
    where
        I: IntoIterator<Item = (Vec<usize>, LaurentPoly)>,
    {
        let mut c = Cochain::zero(degree, rank, nvars);
        for (t, v) in values {
            assert!(
                t.len() == degree && t.windows(2).all(|w| w[0] < w[1]) && t.iter().all(|&i| i < rank),
                "tuple {t:?} is not a sorted {degree}-tuple below {rank}"
            );
            assert_eq!(v.nvars(), nvars);
            let cur = c.get(&t);
            c.set(t, &cur + &v);
        }
        c
    }

    /// `q · e^{i}∧e^{j}`-style 2-form with a single constant value on `(i, j)`, `i < j`.
    pub fn constant_pair(rank: usize, nvars: usize, i: usize, j: usize, q: Rational) -> Self {
        Cochain::from_values(2, rank, nvars, [(vec![i, j], LaurentPoly::constant(nvars, q))])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = (&Vec<usize>, &LaurentPoly)> {
        self.values.iter()
    }

    /// Value on a sorted tuple.
    pub fn get(&self, tuple: &[usize]) -> LaurentPoly {
        self.values.get(tuple).cloned().unwrap_or_else(|| LaurentPoly::zero(self.nvars))
    }

    /// Value on an arbitrary index tuple, using the alternating extension.
    pub fn eval(&self, idx: &[usize]) -> LaurentPoly {
        match sort_with_sign(idx) {
            None => LaurentPoly::zero(self.nvars),
            Some((sorted, sign)) => {
                let v = self.get(&sorted);
                if sign < 0 {
                    -v
                } else {
                    v
                }
            }
        }
    }

    fn set(&mut self, tuple: Vec<usize>, v: LaurentPoly) {
        if v.is_zero() {
            self.values.remove(&tuple);
        } else {
            self.values.insert(tuple, v);
        }
    }

    fn same_shape(&self, other: &Cochain) {
        assert_eq!(
            (self.degree, self.rank, self.nvars),
            (other.degree, other.rank, other.nvars),
            "cochain shape mismatch"
        );
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        self.same_shape(other);
        let mut out = self.clone();
        for (t, v) in &other.values {
            let cur = out.get(t);
            out.set(t.clone(), &cur + v);
        }
        out
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Cochain {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, q: &Rational) -> Cochain {
        let mut out = Cochain::zero(self.degree, self.rank, self.nvars);
        for (t, v) in &self.values {
            out.set(t.clone(), v.scale(q));
        }
        out
    }

    /// `a·ω` for `a ∈ A`.
    pub fn mul_poly(&self, a: &LaurentPoly) -> Cochain {
        let mut out = Cochain::zero(self.degree, self.rank, self.nvars);
        for (t, v) in &self.values {
            out.set(t.clone(), a * v);
        }
        out
    }

    /// Alternating (shuffle) product. `(e^1 ∧ e^2)(e_1, e_2) = 1`.
    pub fn wedge(&self, other: &Cochain) -> Cochain {
        assert_eq!((self.rank, self.nvars), (other.rank, other.nvars), "cochain shape mismatch");
        let degree = self.degree + other.degree;
        let mut out = Cochain::zero(degree, self.rank, self.nvars);
        if degree > self.rank {
            return out;
        }
        for (i, a) in &self.values {
            for (j, b) in &other.values {
                let joined: Vec<usize> = i.iter().chain(j).copied().collect();
                if let Some((sorted, sign)) = sort_with_sign(&joined) {
                    let prod = a * b;
                    let prod = if sign < 0 { -prod } else { prod };
                    let cur = out.get(&sorted);
                    out.set(sorted, &cur + &prod);
                }
            }
        }
        out
    }

    /// The Chevalley–Eilenberg–Rinehart differential:
    /// `(dω)(x_0..x_p) = Σ_a (−1)^a α(x_a)(ω(..x̂_a..)) + Σ_{a<b} (−1)^{a+b} ω([x_a,x_b], ..x̂_a..x̂_b..)`.
    pub fn differential(&self, lr: &LieRinehart) -> Cochain {
        assert_eq!((self.rank, self.nvars), (lr.rank(), lr.nvars()), "cochain does not match presentation");
        let p = self.degree;
        let mut out = Cochain::zero(p + 1, self.rank, self.nvars);
        if self.is_zero() {
            return out;
        }
        for t in sorted_tuples(self.rank, p + 1) {
            let mut acc = LaurentPoly::zero(self.nvars);
            for a in 0..=p {
                let rest: Vec<usize> = t.iter().enumerate().filter(|&(q, _)| q != a).map(|(_, &v)| v).collect();
                let val = self.get(&rest);
                if val.is_zero() {
                    continue;
                }
                let term = lr.derivation(t[a], &val);
                acc = if a % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            if lr.has_brackets() {
                for a in 0..=p {
                    for b in (a + 1)..=p {
                        let br = lr.basis_bracket(t[a], t[b]);
                        if br.is_zero() {
                            continue;
                        }
                        let rest: Vec<usize> = t
                            .iter()
                            .enumerate()
                            .filter(|&(q, _)| q != a && q != b)
                            .map(|(_, &v)| v)
                            .collect();
                        for (k, c) in br.coords().iter().enumerate() {
                            if c.is_zero() {
                                continue;
                            }
                            let mut idx = vec![k];
                            idx.extend_from_slice(&rest);
                            let term = c * &self.eval(&idx);
                            acc = if (a + b) % 2 == 0 { &acc + &term } else { &acc - &term };
                        }
                    }
                }
            }
            out.set(t, acc);
        }
        out
    }

    pub fn is_cocycle(&self, lr: &LieRinehart) -> bool {
        self.differential(lr).is_zero()
    }

    pub fn to_json(&self, ring: &Ring) -> Value {
        let mut values = Map::new();
        for (t, v) in &self.values {
            values.insert(format_tuple(t), Value::String(ring.format(v)));
        }
        serde_json::json!({ "degree": self.degree, "values": values })
    }

    pub fn from_json(value: &Value, ring: &Ring, rank: usize) -> Result<Self> {
        let obj = value.as_object().ok_or_else(|| Error::Schema("cochain must be an object".into()))?;
        if let Some(k) = obj.keys().find(|k| *k != "degree" && *k != "values") {
            return Err(Error::Schema(format!("unknown cochain key `{k}`")));
        }
        let degree = obj
            .get("degree")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Schema("cochain needs an integer `degree`".into()))? as usize;
        let mut c = Cochain::zero(degree, rank, ring.nvars());
        if let Some(vals) = obj.get("values") {
            let vals = vals.as_object().ok_or_else(|| Error::Schema("`values` must be an object".into()))?;
            for (k, v) in vals {
                let t = parse_tuple(k, degree, rank)?;
                let s = v.as_str().ok_or_else(|| Error::Schema(format!("value for `{k}` must be a string")))?;
                c.set(t, ring.parse(s)?);
            }
        }
        Ok(c)
    }

    pub fn random<R: rand::Rng + ?Sized>(lr: &LieRinehart, degree: usize, rng: &mut R) -> Cochain {
        let values = sorted_tuples(lr.rank(), degree)
            .into_iter()
            .map(|t| (t, lr.ring().random_poly(rng, 3, 2)));
        Cochain::from_values(degree, lr.rank(), lr.nvars(), values)
    }
}

/// A class in `H^p(L, A)` carried by a cocycle representative. Comparisons go through
/// [`class_equal`] on the recorded window; classes are never stored as quotients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyClass {
    representative: Cochain,
    window: u32,
}

impl CohomologyClass {
    pub fn new(lr: &LieRinehart, representative: Cochain, window: u32) -> Result<Self> {
        if !representative.is_cocycle(lr) {
            return Err(Error::NotCocycle(format!("degree-{} representative", representative.degree())));
        }
        Ok(CohomologyClass { representative, window })
    }

    pub fn representative(&self) -> &Cochain {
        &self.representative
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn is_zero(&self, lr: &LieRinehart) -> Result<bool> {
        let zero = Cochain::zero(self.representative.degree, self.representative.rank, self.representative.nvars);
        class_equal(lr, &self.representative, &zero, self.window)
    }

    pub fn equals(&self, lr: &LieRinehart, other: &CohomologyClass) -> Result<bool> {
        class_equal(lr, &self.representative, &other.representative, self.window.max(other.window))
    }
}

/// Graded pieces of the cochain complex of a homogeneous presentation.
struct GradedComplex<'a> {
    lr: &'a LieRinehart,
    deltas: Vec<ExponentVector>,
}

type PieceBasis = Vec<(Vec<usize>, ExponentVector)>;

impl<'a> GradedComplex<'a> {
    fn new(lr: &'a LieRinehart) -> Result<Self> {
        Ok(GradedComplex { lr, deltas: lr.grading()? })
    }

    /// Weight of the value monomial `x^v` on tuple `t`: `v − Σ_{i∈t} δ_i`.
    fn weight(&self, t: &[usize], v: &ExponentVector) -> ExponentVector {
        let mut w = v.entries().to_vec();
        for &i in t {
            for (slot, d) in w.iter_mut().zip(self.deltas[i].entries()) {
                *slot -= d;
            }
        }
        ExponentVector::new(w)
    }

    fn basis(&self, p: usize, w: &ExponentVector) -> PieceBasis {
        let ring = self.lr.ring();
        let mut out = Vec::new();
        for t in sorted_tuples(self.lr.rank(), p) {
            let mut v = w.entries().to_vec();
            for &i in &t {
                for (slot, d) in v.iter_mut().zip(self.deltas[i].entries()) {
                    *slot += d;
                }
            }
            let v = ExponentVector::new(v);
            if ring.admits(&v) {
                out.push((t, v));
            }
        }
        out
    }

    fn vector_to_cochain(&self, p: usize, basis: &PieceBasis, coords: &[Rational]) -> Cochain {
        let n = self.lr.nvars();
        let values = basis
            .iter()
            .zip(coords)
            .filter(|(_, c)| !c.is_zero())
            .map(|((t, v), c)| (t.clone(), LaurentPoly::monomial(c.clone(), v.clone())));
        Cochain::from_values(p, self.lr.rank(), n, values)
    }

    /// Matrix of `d: C^p_w → C^{p+1}_w` in the piece bases.
    fn differential_matrix(&self, p: usize, src: &PieceBasis, dst: &PieceBasis) -> Result<QMatrix> {
        let index: HashMap<(&Vec<usize>, &ExponentVector), usize> =
            dst.iter().enumerate().map(|(k, (t, v))| ((t, v), k)).collect();
        let mut cols = Vec::with_capacity(src.len());
        for (t, v) in src {
            let unit = Cochain::from_values(
                p,
                self.lr.rank(),
                self.lr.nvars(),
                [(t.clone(), LaurentPoly::monomial(Rational::one(), v.clone()))],
            );
            let d = unit.differential(self.lr);
            let mut col = vec![Rational::zero(); dst.len()];
            for (t2, poly) in d.values() {
                for (e, c) in poly.terms() {
                    let k = index.get(&(t2, e)).ok_or_else(|| {
                        Error::Inconsistent(format!("differential left the graded piece at tuple ({})", format_tuple(t2)))
                    })?;
                    col[*k] = c.clone();
                }
            }
            cols.push(col);
        }
        Ok(QMatrix::from_columns(dst.len(), &cols))
    }

    /// Splits a cochain into homogeneous coordinate vectors keyed by weight.
    fn decompose(&self, omega: &Cochain) -> BTreeMap<ExponentVector, Vec<(Vec<usize>, ExponentVector, Rational)>> {
        let mut out: BTreeMap<_, Vec<_>> = BTreeMap::new();
        for (t, poly) in omega.values() {
            for (e, c) in poly.terms() {
                out.entry(self.weight(t, e)).or_default().push((t.clone(), e.clone(), c.clone()));
            }
        }
        out
    }

    fn coordinates(basis: &PieceBasis, entries: &[(Vec<usize>, ExponentVector, Rational)]) -> Result<Vec<Rational>> {
        let mut v = vec![Rational::zero(); basis.len()];
        for (t, e, c) in entries {
            let k = basis
                .iter()
                .position(|(bt, be)| bt == t && be == e)
                .ok_or_else(|| Error::Inconsistent("cochain term outside its graded piece".into()))?;
            v[k] = c.clone();
        }
        Ok(v)
    }
}

fn window_weights(nvars: usize, window: u32) -> Vec<ExponentVector> {
    let d = window as i32;
    let mut out = vec![Vec::new()];
    for _ in 0..nvars {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<i32>| {
                (-d..=d).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(ExponentVector::new).collect()
}

fn in_window(w: &ExponentVector, window: u32) -> bool {
    w.entries().iter().all(|k| k.unsigned_abs() <= window)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowCohomology {
    pub degree: usize,
    pub window: u32,
    pub dimension: usize,
    /// Representative cocycles, each homogeneous, ordered by weight.
    pub representatives: Vec<Cochain>,
    /// Nonzero graded contributions.
    pub by_weight: BTreeMap<ExponentVector, usize>,
}

impl WindowCohomology {
    pub fn to_json(&self, ring: &Ring) -> Value {
        serde_json::json!({
            "p": self.degree,
            "D": self.window,
            "dimension": self.dimension,
            "representatives": self.representatives.iter().map(|c| c.to_json(ring)).collect::<Vec<_>>(),
        })
    }
}

/// `H^p` summed over all weights `w` with `|w_i| ≤ window`, by exact linear algebra per weight.
pub fn cohomology_window(lr: &LieRinehart, p: usize, window: u32) -> Result<WindowCohomology> {
    let complex = GradedComplex::new(lr)?;
    let weights = window_weights(lr.nvars(), window);
    let pieces: Vec<Result<(ExponentVector, Vec<Cochain>)>> = weights
        .into_par_iter()
        .map(|w| {
            let here = complex.basis(p, &w);
            if here.is_empty() {
                return Ok((w, Vec::new()));
            }
            let above = complex.basis(p + 1, &w);
            let d_out = complex.differential_matrix(p, &here, &above)?;
            let kernel = d_out.kernel();
            if kernel.is_empty() {
                return Ok((w, Vec::new()));
            }
            let image_cols: Vec<Vec<Rational>> = if p == 0 {
                Vec::new()
            } else {
                let below = complex.basis(p - 1, &w);
                let d_in = complex.differential_matrix(p - 1, &below, &here)?;
                (0..d_in.cols()).map(|j| (0..d_in.rows()).map(|i| d_in[(i, j)].clone()).collect()).collect()
            };
            let mut span = image_cols;
            let mut rank = QMatrix::from_columns(here.len(), &span).rank();
            let mut reps = Vec::new();
            for k in kernel {
                span.push(k.clone());
                let r = QMatrix::from_columns(here.len(), &span).rank();
                if r > rank {
                    rank = r;
                    reps.push(complex.vector_to_cochain(p, &here, &k));
                } else {
                    span.pop();
                }
            }
            Ok((w, reps))
        })
        .collect();

    let mut representatives = Vec::new();
    let mut by_weight = BTreeMap::new();
    for piece in pieces {
        let (w, reps) = piece?;
        if !reps.is_empty() {
            by_weight.insert(w, reps.len());
            representatives.extend(reps);
        }
    }
    Ok(WindowCohomology { degree: p, window, dimension: representatives.len(), representatives, by_weight })
}

/// Betti numbers `b_0..b_l` on the window.
pub fn betti_numbers(lr: &LieRinehart, window: u32) -> Result<Vec<usize>> {
    (0..=lr.rank()).map(|p| cohomology_window(lr, p, window).map(|h| h.dimension)).collect()
}

/// A cochain `η` with `dη = ω`, searched weight by weight inside the window.
/// `Ok(None)` means `ω` is not a coboundary.
pub fn coboundary_primitive(lr: &LieRinehart, omega: &Cochain, window: u32) -> Result<Option<Cochain>> {
    let p = omega.degree();
    let complex = GradedComplex::new(lr)?;
    if p == 0 {
        return Ok(omega.is_zero().then(|| Cochain::zero(0, lr.rank(), lr.nvars())));
    }
    let pieces = complex.decompose(omega);
    if let Some(w) = pieces.keys().find(|w| !in_window(w, window)) {
        return Err(Error::OutsideWindow(format!("{:?}", w.entries())));
    }
    let mut primitive = Cochain::zero(p - 1, lr.rank(), lr.nvars());
    for (w, entries) in pieces {
        let here = complex.basis(p, &w);
        let below = complex.basis(p - 1, &w);
        let d_in = complex.differential_matrix(p - 1, &below, &here)?;
        let target = GradedComplex::coordinates(&here, &entries)?;
        match d_in.solve(&target) {
            None => return Ok(None),
            Some(x) => primitive = primitive.add(&complex.vector_to_cochain(p - 1, &below, &x)),
        }
    }
    Ok(Some(primitive))
}

/// Whether the cocycles `a` and `b` differ by a coboundary of a window-supported form.
pub fn class_equal(lr: &LieRinehart, a: &Cochain, b: &Cochain, window: u32) -> Result<bool> {
    for (name, c) in [("left", a), ("right", b)] {
        if !c.is_cocycle(lr) {
            return Err(Error::NotCocycle(format!("{name} operand of class comparison")));
        }
    }
    Ok(coboundary_primitive(lr, &a.sub(b), window)?.is_some())
}

/// Coordinates of the class of `omega` in the basis `h.representatives`.
pub fn class_coordinates(lr: &LieRinehart, omega: &Cochain, h: &WindowCohomology) -> Result<Vec<Rational>> {
    let p = omega.degree();
    assert_eq!(p, h.degree, "degree mismatch");
    if !omega.is_cocycle(lr) {
        return Err(Error::NotCocycle(format!("degree-{p} input")));
    }
    let complex = GradedComplex::new(lr)?;
    let mut coords = vec![Rational::zero(); h.representatives.len()];
    let rep_weights: Vec<ExponentVector> = h
        .representatives
        .iter()
        .map(|r| {
            let (t, v) = r.values().next().expect("representatives are nonzero");
            complex.weight(t, v.terms().next().unwrap().0)
        })
        .collect();
    for (w, entries) in complex.decompose(omega) {
        if !in_window(&w, h.window) {
            return Err(Error::OutsideWindow(format!("{:?}", w.entries())));
        }
        let here = complex.basis(p, &w);
        let mut cols: Vec<Vec<Rational>> = Vec::new();
        let mut rep_slots = Vec::new();
        for (k, rep) in h.representatives.iter().enumerate() {
            if rep_weights[k] == w {
                let e = complex.decompose(rep).remove(&w).unwrap_or_default();
                cols.push(GradedComplex::coordinates(&here, &e)?);
                rep_slots.push(k);
            }
        }
        if p > 0 {
            let below = complex.basis(p - 1, &w);
            let d_in = complex.differential_matrix(p - 1, &below, &here)?;
            for j in 0..d_in.cols() {
                cols.push((0..d_in.rows()).map(|i| d_in[(i, j)].clone()).collect());
            }
        }
        let target = GradedComplex::coordinates(&here, &entries)?;
        let x = QMatrix::from_columns(here.len(), &cols)
            .solve(&target)
            .ok_or_else(|| Error::Inconsistent("cocycle not expressible in the window basis".into()))?;
        for (slot, k) in rep_slots.iter().enumerate() {
            coords[*k] = x[slot].clone();
        }
    }
    Ok(coords)
}

/// An element of `⊕_m C^{2m}`; component `m` has degree `2m`, for `2m ≤ l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvenClassPolynomial {
    components: Vec<Cochain>,
}

impl EvenClassPolynomial {
    pub fn zero(rank: usize, nvars: usize) -> Self {
        EvenClassPolynomial { components: (0..=rank / 2).map(|m| Cochain::zero(2 * m, rank, nvars)).collect() }
    }

    pub fn constant(rank: usize, nvars: usize, q: Rational) -> Self {
        let mut out = Self::zero(rank, nvars);
        out.components[0] = Cochain::scalar(rank, LaurentPoly::constant(nvars, q));
        out
    }

    pub fn one(rank: usize, nvars: usize) -> Self {
        Self::constant(rank, nvars, Rational::one())
    }

    /// Places `c` (of even degree) into its slot.
    pub fn from_component(c: Cochain) -> Self {
        assert!(c.degree().is_multiple_of(2), "odd-degree component");
        let mut out = Self::zero(c.rank(), c.nvars());
        if c.degree() <= c.rank() {
            let m = c.degree() / 2;
            out.components[m] = c;
        }
        out
    }

    pub fn components(&self) -> &[Cochain] {
        &self.components
    }

    pub fn component(&self, m: usize) -> &Cochain {
        &self.components[m]
    }

    pub fn rank(&self) -> usize {
        self.components[0].rank()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Cochain::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        EvenClassPolynomial {
            components: self.components.iter().zip(&other.components).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        EvenClassPolynomial { components: self.components.iter().map(|c| c.scale(q)).collect() }
    }

    /// Product in the truncated even ring (wedge of components).
    pub fn mul(&self, other: &Self) -> Self {
        let top = self.components.len();
        let mut out = Self::zero(self.rank(), self.components[0].nvars());
        for a in 0..top {
            for b in 0..(top - a) {
                out.components[a + b] = out.components[a + b].add(&self.components[a].wedge(&other.components[b]));
            }
        }
        out
    }

    /// `exp(x) = Σ_m x^m / m!` for a 2-form `x`, truncated at degree `l`. No cocycle check.
    pub fn exp(x: &Cochain) -> Self {
        assert_eq!(x.degree(), 2, "exp takes a 2-form");
        let mut out = Self::one(x.rank(), x.nvars());
        let mut power = Cochain::scalar(x.rank(), LaurentPoly::one(x.nvars()));
        for m in 1..out.components.len() {
            power = power.wedge(x);
            out.components[m] = power.scale(&factorial(m as u64).recip());
        }
        out
    }

    pub fn to_json(&self, ring: &Ring) -> Value {
        Value::Array(self.components.iter().map(|c| c.to_json(ring)).collect())
    }
}

/// `exp` of a degree-2 cocycle.
pub fn exp_class(lr: &LieRinehart, x: &Cochain) -> Result<EvenClassPolynomial> {
    if x.degree() != 2 {
        return Err(Error::InvalidArgument(format!("exp takes a 2-cocycle, got degree {}", x.degree())));
    }
    if !x.is_cocycle(lr) {
        return Err(Error::NotCocycle("argument of exp".into()));
    }
    Ok(EvenClassPolynomial::exp(x))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharRingDim {
    pub dimension: usize,
    /// Whether the inputs were independent in window `H^2`.
    pub independent: bool,
}

/// Dimension of the ℚ-span of `{exp(x_b)}` inside window cohomology `⊕ H^{2m}`.
pub fn char_ring_dim(lr: &LieRinehart, basis: &[Cochain], window: u32) -> Result<CharRingDim> {
    if basis.is_empty() {
        return Ok(CharRingDim { dimension: 0, independent: true });
    }
    let top = lr.rank() / 2;
    let spaces: Vec<WindowCohomology> =
        (0..=top).map(|m| cohomology_window(lr, 2 * m, window)).collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(basis.len());
    let mut h2_rows = Vec::with_capacity(basis.len());
    for x in basis {
        let e = exp_class(lr, x)?;
        let mut row = Vec::new();
        for (m, h) in spaces.iter().enumerate() {
            let coords = class_coordinates(lr, e.component(m), h)?;
            if m == 1 {
                h2_rows.push(coords.clone());
            }
            row.extend(coords);
        }
        rows.push(row);
    }
    let rank_of = |rows: &[Vec<Rational>]| {
        let len = rows[0].len();
        QMatrix::from_columns(len, rows).rank()
    };
    let dimension = rank_of(&rows);
    let independent = !h2_rows.is_empty() && !h2_rows[0].is_empty() && rank_of(&h2_rows) == basis.len();
    Ok(CharRingDim { dimension, independent })
}

/// The set of tuples on which a cochain is nonzero.
pub fn support(c: &Cochain) -> BTreeSet<Vec<usize>> {
    c.values().map(|(t, _)| t.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, ratio};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f_tor(lr: &LieRinehart) -> Cochain {
        Cochain::constant_pair(lr.rank(), lr.nvars(), 0, 1, int(1))
    }

    #[test]
    fn tuples_and_signs() {
        assert_eq!(sorted_tuples(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(sorted_tuples(2, 3).len(), 0);
        assert_eq!(sorted_tuples(2, 0), vec![Vec::<usize>::new()]);
        assert_eq!(sort_with_sign(&[2, 0, 1]), Some((vec![0, 1, 2], 1)));
        assert_eq!(sort_with_sign(&[1, 0]), Some((vec![0, 1], -1)));
        assert_eq!(sort_with_sign(&[1, 1]), None);
    }

    #[test]
    fn differential_of_a_function_on_the_torus() {
        let t = LieRinehart::torus(2).unwrap();
        let a = t.ring().parse("x^2*y^-1 + 3*x").unwrap();
        let d = Cochain::scalar(2, a.clone()).differential(&t);
        // direct formula: dω(θ_x) = x ∂a/∂x, dω(θ_y) = y ∂a/∂y
        assert_eq!(d.get(&[0]), &t.ring().var(0) * &a.partial(0).unwrap());
        assert_eq!(d.get(&[1]), &t.ring().var(1) * &a.partial(1).unwrap());
    }

    #[test]
    fn top_degree_forms_are_closed() {
        let t = LieRinehart::torus(2).unwrap();
        let d = f_tor(&t).differential(&t);
        assert_eq!(d.degree(), 3);
        assert!(d.is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(Cochain::random(&t, 2, &mut rng).is_cocycle(&t));
    }

    #[test]
    fn cocycle_detection_on_torus3() {
        let t = LieRinehart::torus(3).unwrap();
        let n = t.nvars();
        let consts = Cochain::from_values(
            2,
            3,
            n,
            [
                (vec![0, 1], LaurentPoly::from_int(n, 1)),
                (vec![0, 2], LaurentPoly::from_int(n, 2)),
                (vec![1, 2], LaurentPoly::from_int(n, -1)),
            ],
        );
        assert!(consts.is_cocycle(&t));
        let bad = Cochain::from_values(2, 3, n, [(vec![0, 1], t.ring().var(2))]);
        let d = bad.differential(&t);
        // dω(θ1,θ2,θ3) = θ3(x3) = x3 by the formula
        assert_eq!(d.get(&[0, 1, 2]), t.ring().var(2));
        assert!(!bad.is_cocycle(&t));
    }

    #[test]
    fn wedge_basics() {
        let t = LieRinehart::torus(2).unwrap();
        let n = t.nvars();
        let dx = Cochain::from_values(1, 2, n, [(vec![0], LaurentPoly::one(n))]);
        let dy = Cochain::from_values(1, 2, n, [(vec![1], LaurentPoly::one(n))]);
        assert!(dx.wedge(&dx).is_zero());
        assert_eq!(dx.wedge(&dy), f_tor(&t));
        assert_eq!(dy.wedge(&dx), f_tor(&t).neg());
        let a = t.ring().parse("x + 2").unwrap();
        assert_eq!(Cochain::scalar(2, a.clone()).wedge(&dy), dy.mul_poly(&a));
        assert!(f_tor(&t).wedge(&f_tor(&t)).is_zero());
    }

    #[test]
    fn torus_window_cohomology() {
        let t = LieRinehart::torus(2).unwrap();
        let h2 = cohomology_window(&t, 2, 4).unwrap();
        assert_eq!(h2.dimension, 1);
        assert!(class_equal(&t, &h2.representatives[0], &f_tor(&t), 4).is_ok());
        assert_eq!(cohomology_window(&t, 1, 4).unwrap().dimension, 2);
        assert_eq!(betti_numbers(&t, 2).unwrap(), vec![1, 2, 1]);
    }

    #[test]
    fn point_abelian_and_affine_cohomology() {
        let p = LieRinehart::point_abelian(2).unwrap();
        for d in [0, 3] {
            assert_eq!(cohomology_window(&p, 2, d).unwrap().dimension, 1);
        }
        let a = LieRinehart::affine(1).unwrap();
        assert_eq!(betti_numbers(&a, 3).unwrap(), vec![1, 0]);
    }

    #[test]
    fn class_comparisons() {
        let t = LieRinehart::torus(2).unwrap();
        let f = f_tor(&t);
        assert!(class_equal(&t, &f, &f, 4).unwrap());
        assert!(!class_equal(&t, &f, &f.scale(&int(2)), 4).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let eta = Cochain::random(&t, 1, &mut rng);
        let shifted = f.add(&eta.differential(&t));
        assert!(class_equal(&t, &f, &shifted, 4).unwrap());
        let prim = coboundary_primitive(&t, &eta.differential(&t), 4).unwrap().unwrap();
        assert_eq!(prim.differential(&t), eta.differential(&t));

        let far = Cochain::from_values(2, 2, 2, [(vec![0, 1], t.ring().parse("x^9").unwrap())]);
        assert!(matches!(class_equal(&t, &far, &f, 4), Err(Error::OutsideWindow(_))));
        let not_closed = Cochain::from_values(1, 2, 2, [(vec![0], t.ring().var(1))]);
        assert!(matches!(class_equal(&t, &not_closed, &not_closed, 4), Err(Error::NotCocycle(_))));
    }

    #[test]
    fn exp_truncation() {
        let t = LieRinehart::torus(2).unwrap();
        let e = exp_class(&t, &f_tor(&t)).unwrap();
        assert_eq!(e.components().len(), 2);
        assert_eq!(e.component(0), &Cochain::scalar(2, LaurentPoly::one(2)));
        assert_eq!(e.component(1), &f_tor(&t));
        let z = exp_class(&t, &Cochain::zero(2, 2, 2)).unwrap();
        assert_eq!(z, EvenClassPolynomial::one(2, 2));

        let p4 = LieRinehart::point_abelian(4).unwrap();
        let x = Cochain::constant_pair(4, 0, 0, 1, int(1)).add(&Cochain::constant_pair(4, 0, 2, 3, int(1)));
        let e4 = exp_class(&p4, &x).unwrap();
        let sq = x.wedge(&x);
        assert!(!sq.is_zero());
        assert_eq!(e4.component(2), &sq.scale(&ratio(1, 2)));
    }

    #[test]
    fn char_ring_dimensions() {
        let t = LieRinehart::torus(2).unwrap();
        let d = char_ring_dim(&t, &[f_tor(&t)], 3).unwrap();
        assert_eq!(d, CharRingDim { dimension: 1, independent: true });
        assert_eq!(char_ring_dim(&t, &[], 3).unwrap().dimension, 0);
        let p3 = LieRinehart::point_abelian(3).unwrap();
        let forms: Vec<Cochain> =
            [(0, 1), (0, 2), (1, 2)].iter().map(|&(i, j)| Cochain::constant_pair(3, 0, i, j, int(1))).collect();
        assert_eq!(char_ring_dim(&p3, &forms, 1).unwrap().dimension, 3);
        let dep = vec![forms[0].clone(), forms[0].scale(&int(2))];
        let r = char_ring_dim(&p3, &dep, 1).unwrap();
        assert!(!r.independent);
        assert_eq!(r.dimension, 2);
    }

    #[test]
    fn json_round_trip() {
        let t = LieRinehart::torus(2).unwrap();
        let c = Cochain::from_values(2, 2, 2, [(vec![0, 1], t.ring().parse("3/2*x^-1 + y").unwrap())]);
        let v = c.to_json(t.ring());
        assert_eq!(v["values"]["1,2"], "3/2*x^-1 + y");
        assert_eq!(Cochain::from_json(&v, t.ring(), 2).unwrap(), c);
        let bad = serde_json::json!({"degree": 2, "values": {"2,1": "1"}});
        assert!(Cochain::from_json(&bad, t.ring(), 2).is_err());
        let scalar = serde_json::json!({"degree": 0, "values": {"": "x"}});
        assert_eq!(Cochain::from_json(&scalar, t.ring(), 2).unwrap().get(&[]), t.ring().var(0));
    }
}
