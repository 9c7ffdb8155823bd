//! Connections on free `A`-modules of finite rank.
//!
//! A connection is given by one matrix `Ω_i` per basis element of `L`, acting on
//! coordinate columns by `∇(e_i) v = α(e_i)(v) + Ω_i v`.

use std::collections::BTreeMap;

use num_traits::One;
use serde_json::Value;

use crate::arith::rational::factorial;
use crate::arith::{LaurentPoly, Rational, Ring};
use crate::cochain::{sort_with_sign, sorted_tuples, Cochain, CohomologyClass, EvenClassPolynomial};
use crate::error::{Error, Result};
use crate::lralg::LieRinehart;

/// Square matrix over `A`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    size: usize,
    nvars: usize,
    data: Vec<LaurentPoly>,
}

impl PolyMatrix {
    pub fn zeros(size: usize, nvars: usize) -> Self {
        PolyMatrix { size, nvars, data: vec![LaurentPoly::zero(nvars); size * size] }
    }

    pub fn identity(size: usize, nvars: usize) -> Self {
        Self::scalar(size, &LaurentPoly::one(nvars))
    }

    /// `a · Id`.
    pub fn scalar(size: usize, a: &LaurentPoly) -> Self {
        let mut m = Self::zeros(size, a.nvars());
        for i in 0..size {
            m.set(i, i, a.clone());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<LaurentPoly>>, nvars: usize) -> Result<Self> {
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return Err(Error::Schema("matrix must be square".into()));
        }
        if rows.iter().flatten().any(|a| a.nvars() != nvars) {
            return Err(Error::Schema("matrix entries live in a different ring".into()));
        }
        Ok(PolyMatrix { size, nvars, data: rows.into_iter().flatten().collect() })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.data[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, a: LaurentPoly) {
        self.data[i * self.size + j] = a;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(LaurentPoly::is_zero)
    }

    fn zip_with(&self, other: &PolyMatrix, f: impl Fn(&LaurentPoly, &LaurentPoly) -> LaurentPoly) -> PolyMatrix {
        assert_eq!(self.size, other.size, "matrix size mismatch");
        PolyMatrix {
            size: self.size,
            nvars: self.nvars,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.size, other.size, "matrix size mismatch");
        let n = self.size;
        let mut out = PolyMatrix::zeros(n, self.nvars);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j) + &(a * b);
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[LaurentPoly]) -> Vec<LaurentPoly> {
        (0..self.size)
            .map(|i| (0..self.size).fold(LaurentPoly::zero(self.nvars), |acc, j| &acc + &(self.get(i, j) * &v[j])))
            .collect()
    }

    pub fn scale(&self, a: &LaurentPoly) -> PolyMatrix {
        PolyMatrix { size: self.size, nvars: self.nvars, data: self.data.iter().map(|x| a * x).collect() }
    }

    pub fn map(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> PolyMatrix {
        PolyMatrix { size: self.size, nvars: self.nvars, data: self.data.iter().map(f).collect() }
    }

    pub fn trace(&self) -> LaurentPoly {
        (0..self.size).fold(LaurentPoly::zero(self.nvars), |acc, i| &acc + self.get(i, i))
    }

    /// Kronecker product, index `(a, b) ↦ a·m + b`.
    pub fn kron(&self, other: &PolyMatrix) -> PolyMatrix {
        let (n, m) = (self.size, other.size);
        let mut out = PolyMatrix::zeros(n * m, self.nvars);
        for a in 0..n {
            for a2 in 0..n {
                let x = self.get(a, a2);
                if x.is_zero() {
                    continue;
                }
                for b in 0..m {
                    for b2 in 0..m {
                        out.set(a * m + b, a2 * m + b2, x * other.get(b, b2));
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self, ring: &Ring) -> Value {
        Value::Array(
            (0..self.size)
                .map(|i| Value::Array((0..self.size).map(|j| Value::String(ring.format(self.get(i, j)))).collect()))
                .collect(),
        )
    }

    pub fn from_json(v: &Value, ring: &Ring) -> Result<Self> {
        let rows = v.as_array().ok_or_else(|| Error::Schema("matrix must be an array of rows".into()))?;
        let rows = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::Schema("matrix row must be an array".into()))?
                    .iter()
                    .map(|e| {
                        let s = e.as_str().ok_or_else(|| Error::Schema("matrix entry must be a string".into()))?;
                        Ok(ring.parse(s)?)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        PolyMatrix::from_rows(rows, ring.nvars())
    }
}

/// Matrix-valued alternating form, stored on sorted tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixForm {
    degree: usize,
    rank: usize,
    size: usize,
    nvars: usize,
    values: BTreeMap<Vec<usize>, PolyMatrix>,
}

/// `R(e_i, e_j)` for `i < j`.
pub type CurvatureForm = MatrixForm;

impl MatrixForm {
    pub fn zero(degree: usize, rank: usize, size: usize, nvars: usize) -> Self {
        MatrixForm { degree, rank, size, nvars, values: BTreeMap::new() }
    }

    /// Degree-0 form `Id`.
    pub fn identity(rank: usize, size: usize, nvars: usize) -> Self {
        let mut m = Self::zero(0, rank, size, nvars);
        m.values.insert(vec![], PolyMatrix::identity(size, nvars));
        m
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, tuple: &[usize]) -> PolyMatrix {
        self.values.get(tuple).cloned().unwrap_or_else(|| PolyMatrix::zeros(self.size, self.nvars))
    }

    pub fn values(&self) -> impl Iterator<Item = (&Vec<usize>, &PolyMatrix)> {
        self.values.iter()
    }

    fn set(&mut self, tuple: Vec<usize>, m: PolyMatrix) {
        if m.is_zero() {
            self.values.remove(&tuple);
        } else {
            self.values.insert(tuple, m);
        }
    }

    pub fn sub(&self, other: &MatrixForm) -> MatrixForm {
        let mut out = self.clone();
        for (t, m) in &other.values {
            let cur = out.get(t);
            out.set(t.clone(), cur.sub(m));
        }
        out
    }

    /// Wedge with matrix multiplication of the values.
    pub fn wedge(&self, other: &MatrixForm) -> MatrixForm {
        let degree = self.degree + other.degree;
        let mut out = MatrixForm::zero(degree, self.rank, self.size, self.nvars);
        if degree > self.rank {
            return out;
        }
        for (i, a) in &self.values {
            for (j, b) in &other.values {
                let joined: Vec<usize> = i.iter().chain(j).copied().collect();
                if let Some((sorted, sign)) = sort_with_sign(&joined) {
                    let mut prod = a.mul(b);
                    if sign < 0 {
                        prod = prod.scale(&LaurentPoly::from_int(self.nvars, -1));
                    }
                    let cur = out.get(&sorted);
                    out.set(sorted, cur.add(&prod));
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Cochain {
        Cochain::from_values(self.degree, self.rank, self.nvars, self.values.iter().map(|(t, m)| (t.clone(), m.trace())))
    }

    /// `ω · Id`.
    pub fn from_scalar(c: &Cochain, size: usize) -> MatrixForm {
        let mut out = MatrixForm::zero(c.degree(), c.rank(), size, c.nvars());
        for (t, v) in c.values() {
            out.set(t.clone(), PolyMatrix::scalar(size, v));
        }
        out
    }

    pub fn to_json(&self, ring: &Ring) -> Value {
        let map: serde_json::Map<String, Value> = self
            .values
            .iter()
            .map(|(t, m)| (crate::cochain::format_tuple(t), m.to_json(ring)))
            .collect();
        Value::Object(map)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    lr: LieRinehart,
    rank: usize,
    omega: Vec<PolyMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureTypeReport {
    pub holds: bool,
    /// `R − f·Id`.
    pub deviation: CurvatureForm,
}

impl Connection {
    pub fn new(lr: LieRinehart, omega: Vec<PolyMatrix>) -> Result<Self> {
        if omega.len() != lr.rank() {
            return Err(Error::Schema(format!("expected {} connection matrices, got {}", lr.rank(), omega.len())));
        }
        let rank = match omega.first() {
            Some(m) => m.size(),
            None => return Err(Error::Unsupported("connections over rank-0 L".into())),
        };
        if rank == 0 || omega.iter().any(|m| m.size() != rank || m.nvars != lr.nvars()) {
            return Err(Error::Schema("connection matrices must share a positive size".into()));
        }
        Ok(Connection { lr, rank, omega })
    }

    pub fn flat(lr: LieRinehart, rank: usize) -> Self {
        let omega = vec![PolyMatrix::zeros(rank, lr.nvars()); lr.rank()];
        Connection { lr, rank, omega }
    }

    /// `Ω_i = ω(e_i) · Id`, of curvature type `dω`.
    pub fn scalar_type(lr: LieRinehart, rank: usize, omega: &Cochain) -> Self {
        assert_eq!(omega.degree(), 1, "scalar synthesis takes a 1-form");
        let omega = (0..lr.rank()).map(|i| PolyMatrix::scalar(rank, &omega.get(&[i]))).collect();
        Connection { lr, rank, omega }
    }

    pub fn lie_rinehart(&self) -> &LieRinehart {
        &self.lr
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn omega(&self) -> &[PolyMatrix] {
        &self.omega
    }

    /// `∇(e_i)(v)`.
    pub fn apply(&self, i: usize, v: &[LaurentPoly]) -> Vec<LaurentPoly> {
        let ov = self.omega[i].mul_vec(v);
        v.iter().zip(ov).map(|(x, y)| &self.lr.derivation(i, x) + &y).collect()
    }

    fn omega_bracket(&self, i: usize, j: usize) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(self.rank, self.lr.nvars());
        for (k, c) in self.lr.basis_bracket(i, j).coords().iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.omega[k].scale(c));
            }
        }
        out
    }

    /// `R(e_i, e_j) = α_i(Ω_j) − α_j(Ω_i) + [Ω_i, Ω_j] − Σ_k c_{ij}^k Ω_k`.
    pub fn curvature_pair(&self, i: usize, j: usize) -> PolyMatrix {
        let (oi, oj) = (&self.omega[i], &self.omega[j]);
        let ai = oj.map(|a| self.lr.derivation(i, a));
        let aj = oi.map(|a| self.lr.derivation(j, a));
        ai.sub(&aj).add(&oi.mul(oj)).sub(&oj.mul(oi)).sub(&self.omega_bracket(i, j))
    }

    pub fn curvature(&self) -> CurvatureForm {
        let mut out = MatrixForm::zero(2, self.lr.rank(), self.rank, self.lr.nvars());
        for t in sorted_tuples(self.lr.rank(), 2) {
            let r = self.curvature_pair(t[0], t[1]);
            out.set(t, r);
        }
        out
    }

    pub fn is_curvature_type(&self, f: &Cochain) -> CurvatureTypeReport {
        assert_eq!(f.degree(), 2, "curvature type is a 2-form");
        let deviation = self.curvature().sub(&MatrixForm::from_scalar(f, self.rank));
        CurvatureTypeReport { holds: deviation.is_zero(), deviation }
    }

    pub fn trace_curvature(&self) -> Cochain {
        self.curvature().trace()
    }

    pub fn c1(&self, window: u32) -> Result<CohomologyClass> {
        let tr = self.trace_curvature();
        if !tr.is_cocycle(&self.lr) {
            return Err(Error::Inconsistent("trace of curvature is not closed".into()));
        }
        CohomologyClass::new(&self.lr, tr, window)
    }

    /// `Σ_m tr(R^m)/m!`; the degree-0 part is the rank.
    pub fn chern_character(&self) -> EvenClassPolynomial {
        let l = self.lr.rank();
        let n = self.lr.nvars();
        let r = self.curvature();
        let mut out = EvenClassPolynomial::constant(l, n, Rational::from_integer(self.rank.into()));
        let mut power = MatrixForm::identity(l, self.rank, n);
        for m in 1..=l / 2 {
            power = power.wedge(&r);
            let term = power.trace().scale(&factorial(m as u64).recip());
            out = out.add(&EvenClassPolynomial::from_component(term));
        }
        out
    }

    /// `∇ ⊗ ∇'`, with `Ω_i ⊗ Id + Id ⊗ Ω'_i`.
    pub fn tensor(&self, other: &Connection) -> Result<Connection> {
        if self.lr.presentation() != other.lr.presentation() {
            return Err(Error::InvalidArgument("tensor product of connections over different presentations".into()));
        }
        let n = self.lr.nvars();
        let (id, id2) = (PolyMatrix::identity(self.rank, n), PolyMatrix::identity(other.rank, n));
        let omega = self.omega.iter().zip(&other.omega).map(|(a, b)| a.kron(&id2).add(&id.kron(b))).collect();
        Ok(Connection { lr: self.lr.clone(), rank: self.rank * other.rank, omega })
    }

    /// Induced connection on `Λ^d`, basis the sorted `d`-subsets of `0..r`.
    pub fn wedge_power(&self, d: usize) -> Result<Connection> {
        if d == 0 || d > self.rank {
            return Err(Error::InvalidArgument(format!("exterior power {d} of a rank-{} module", self.rank)));
        }
        let subsets = sorted_tuples(self.rank, d);
        let index: BTreeMap<&Vec<usize>, usize> = subsets.iter().enumerate().map(|(k, s)| (s, k)).collect();
        let n = self.lr.nvars();
        let omega = self
            .omega
            .iter()
            .map(|om| {
                let mut out = PolyMatrix::zeros(subsets.len(), n);
                for (col, s) in subsets.iter().enumerate() {
                    for a in 0..d {
                        for t in 0..self.rank {
                            let c = om.get(t, s[a]);
                            if c.is_zero() {
                                continue;
                            }
                            let mut replaced = s.clone();
                            replaced[a] = t;
                            if let Some((sorted, sign)) = sort_with_sign(&replaced) {
                                let row = index[&sorted];
                                let term = if sign < 0 { -c.clone() } else { c.clone() };
                                let cur = out.get(row, col) + &term;
                                out.set(row, col, cur);
                            }
                        }
                    }
                }
                out
            })
            .collect();
        Ok(Connection { lr: self.lr.clone(), rank: subsets.len(), omega })
    }

    pub fn to_json(&self) -> Value {
        let ring = self.lr.ring();
        serde_json::json!({
            "rank": self.rank,
            "omega": self.omega.iter().map(|m| m.to_json(ring)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value, lr: &LieRinehart) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Schema("connection must be an object".into()))?;
        if let Some(k) = obj.keys().find(|k| *k != "rank" && *k != "omega") {
            return Err(Error::Schema(format!("unknown connection key `{k}`")));
        }
        let rank = obj
            .get("rank")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Schema("connection needs an integer `rank`".into()))? as usize;
        let omega = obj
            .get("omega")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Schema("connection needs an `omega` array".into()))?
            .iter()
            .map(|m| PolyMatrix::from_json(m, lr.ring()))
            .collect::<Result<Vec<_>>>()?;
        if omega.iter().any(|m| m.size() != rank) {
            return Err(Error::Schema(format!("connection matrices must be {rank}×{rank}")));
        }
        Connection::new(lr.clone(), omega)
    }
}

/// `1 − r + r·exp(f)` as an even class polynomial; `f` a 2-cocycle.
pub fn scalar_type_character(rank: usize, f: &Cochain) -> EvenClassPolynomial {
    let r = Rational::from_integer(rank.into());
    EvenClassPolynomial::constant(f.rank(), f.nvars(), Rational::one() - &r)
        .add(&EvenClassPolynomial::exp(f).scale(&r))
}
