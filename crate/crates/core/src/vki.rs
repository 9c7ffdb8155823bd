//! Truncations `Ṽ^{k,i}` of a twisted enveloping algebra: the free `A`-module on ordered
//! monomials of degree `k ≤ |P| ≤ k+i−1`, with `L` acting by left multiplication followed
//! by projection back onto that degree window.

use serde_json::{Map, Value};

use crate::arith::rational::binomial;
use crate::arith::{LaurentPoly, Rational};
use crate::cochain::{format_tuple, sorted_tuples, Cochain};
use crate::conn::{Connection, PolyMatrix};
use crate::env::{Mode, PbwMonomial, RewriteSystem, Strategy, Token, UElement, WordTerm};
use crate::error::{Error, Result};
use crate::kledger::{KAtom, KClass};
use crate::lralg::LieRinehart;

/// `C(l+k+i−1, l) − C(l+k−1, l)`.
pub fn vki_rank(l: usize, k: usize, i: usize) -> u64 {
    let (l, k, i) = (l as u64, k as u64, i as u64);
    binomial(l + k + i - 1, l) - binomial(l + k - 1, l)
}

/// Exponent vectors of degree `k..k+i`, by degree, then lexicographically descending.
pub fn window_basis(l: usize, k: usize, i: usize) -> Vec<Vec<u32>> {
    fn rec(l: usize, d: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == l {
            cur.push(d);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for p in (0..=d).rev() {
            cur.push(p);
            rec(l, d - p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if l == 0 {
        return out;
    }
    for d in k..k + i {
        rec(l, d as u32, &mut Vec::with_capacity(l), &mut out);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankCheck {
    pub enumerated: u64,
    pub formula: u64,
    pub agrees: bool,
}

/// Counts the window by brute force over the exponent box and compares with the closed form.
pub fn rank_check(k: usize, i: usize, l: usize) -> RankCheck {
    let top = (k + i - 1) as u32;
    let mut enumerated = 0u64;
    let mut v = vec![0u32; l];
    loop {
        let d: u32 = v.iter().sum();
        if d as usize >= k && d <= top {
            enumerated += 1;
        }
        let mut slot = 0;
        while slot < l && v[slot] == top {
            v[slot] = 0;
            slot += 1;
        }
        if slot == l {
            break;
        }
        v[slot] += 1;
    }
    let formula = vki_rank(l, k, i);
    RankCheck { enumerated, formula, agrees: enumerated == formula }
}

#[derive(Clone, Debug)]
pub struct VkiModule {
    pub k: usize,
    pub i: usize,
    pub basis: Vec<PbwMonomial>,
    pub connection: Connection,
    system: RewriteSystem,
}

fn coordinates(u: &UElement, basis: &[PbwMonomial], nvars: usize) -> Vec<LaurentPoly> {
    let mut out = vec![LaurentPoly::zero(nvars); basis.len()];
    for (m, c) in u.terms() {
        let slot = basis.iter().position(|b| b == m).expect("windowed element lies in the basis span");
        out[slot] = c.clone();
    }
    out
}

fn columns_to_matrix(cols: &[Vec<LaurentPoly>], nvars: usize) -> PolyMatrix {
    let n = cols.len();
    let mut m = PolyMatrix::zeros(n, nvars);
    for (j, col) in cols.iter().enumerate() {
        for (i, a) in col.iter().enumerate() {
            m.set(i, j, a.clone());
        }
    }
    m
}

/// Builds `Ṽ^{k,i}` from a twisted rewriting system with cocycle twist.
pub fn build_vki(sys: &RewriteSystem, k: usize, i: usize) -> Result<VkiModule> {
    if k == 0 || i == 0 {
        return Err(Error::InvalidArgument(format!("k and i must be positive, got k={k}, i={i}")));
    }
    if sys.mode() != Mode::Twisted {
        return Err(Error::InvalidArgument("truncated modules are built from the twisted algebra".into()));
    }
    let lr = sys.lie_rinehart();
    if !sys.twist().is_cocycle(lr) {
        return Err(Error::NotCocycle("twist of the enveloping algebra".into()));
    }
    let l = lr.rank();
    let n = lr.nvars();
    let basis: Vec<PbwMonomial> = window_basis(l, k, i).into_iter().map(PbwMonomial::new).collect();
    let (lo, hi) = (k as u32, (k + i) as u32);
    let omega = (0..l)
        .map(|j| {
            let cols: Vec<Vec<LaurentPoly>> = basis
                .iter()
                .map(|p| {
                    let img = sys.left_mul_gen(j, &UElement::term(p.clone(), LaurentPoly::one(n)));
                    coordinates(&img.degree_window(lo, hi), &basis, n)
                })
                .collect();
            columns_to_matrix(&cols, n)
        })
        .collect();
    let connection = Connection::new(lr.clone(), omega)?;
    Ok(VkiModule { k, i, basis, connection, system: sys.clone() })
}

#[derive(Clone, Debug)]
pub struct PairDeviation {
    /// 0-based `(a, b)`, `a < b`.
    pub pair: (usize, usize),
    pub curvature: PolyMatrix,
    /// `R − f(e_a, e_b)·Id`.
    pub deviation: PolyMatrix,
    /// Curvature recomputed from unprojected products and the projection leakage.
    pub oracle: PolyMatrix,
}

#[derive(Clone, Debug)]
pub struct CurvatureReport {
    pub pairs: Vec<PairDeviation>,
    /// Per basis element: `k < |P| < k+i−1`.
    pub interior: Vec<bool>,
    /// Zero deviation on every interior column.
    pub interior_scalar: bool,
    /// Zero deviation everywhere.
    pub scalar: bool,
    /// Connection matrices agree with literal rewriting of `e_j·P` followed by projection.
    pub connection_matches_oracle: bool,
    pub curvature_matches_oracle: bool,
    /// `e_a e_b P − e_b e_a P − [e_a,e_b] P = f(e_a,e_b) P` in the full algebra.
    pub unprojected_scalar: bool,
}

impl VkiModule {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn system(&self) -> &RewriteSystem {
        &self.system
    }

    fn nvars(&self) -> usize {
        self.system.lie_rinehart().nvars()
    }

    fn window(&self, u: &UElement) -> UElement {
        u.degree_window(self.k as u32, (self.k + self.i) as u32)
    }

    /// `e_j · u` by literal leftmost rewriting, independent of the nested engine.
    fn literal_left_gen(&self, j: usize, u: &UElement) -> UElement {
        let words: Vec<WordTerm> = u
            .terms()
            .map(|(m, c)| {
                let mut w = vec![Token::Gen(j)];
                w.extend(RewriteSystem::spell(m, c));
                (LaurentPoly::one(self.nvars()), w)
            })
            .collect();
        self.system.normal_form_terms(&words, Strategy::Leftmost)
    }

    fn unit(&self, p: &PbwMonomial) -> UElement {
        UElement::term(p.clone(), LaurentPoly::one(self.nvars()))
    }

    pub fn curvature_report(&self) -> CurvatureReport {
        let lr = self.system.lie_rinehart();
        let n = self.nvars();
        let l = lr.rank();
        let (k, top) = (self.k as u32, (self.k + self.i - 1) as u32);
        let interior: Vec<bool> = self.basis.iter().map(|p| k < p.degree() && p.degree() < top).collect();

        let mut connection_matches_oracle = true;
        for j in 0..l {
            let cols: Vec<Vec<LaurentPoly>> = self
                .basis
                .iter()
                .map(|p| coordinates(&self.window(&self.literal_left_gen(j, &self.unit(p))), &self.basis, n))
                .collect();
            connection_matches_oracle &= columns_to_matrix(&cols, n) == self.connection.omega()[j];
        }

        let curvature = self.connection.curvature();
        let f = self.system.twist();
        let mut pairs = Vec::new();
        let mut unprojected_scalar = true;
        let mut curvature_matches_oracle = true;
        for t in sorted_tuples(l, 2) {
            let (a, b) = (t[0], t[1]);
            let fab = f.get(&t);
            let mut cols = Vec::with_capacity(self.rank());
            for p in &self.basis {
                let v = self.unit(p);
                let ebp = self.literal_left_gen(b, &v);
                let eap = self.literal_left_gen(a, &v);
                let mut full = self.literal_left_gen(a, &ebp).sub(&self.literal_left_gen(b, &eap));
                for (c, coef) in lr.basis_bracket(a, b).coords().iter().enumerate() {
                    if !coef.is_zero() {
                        full = full.sub(&self.literal_left_gen(c, &v).left_coef(coef));
                    }
                }
                unprojected_scalar &= full == v.left_coef(&fab);
                let leak_b = self.literal_left_gen(a, &ebp.sub(&self.window(&ebp)));
                let leak_a = self.literal_left_gen(b, &eap.sub(&self.window(&eap)));
                let col = self.window(&full).sub(&self.window(&leak_b).sub(&self.window(&leak_a)));
                cols.push(coordinates(&col, &self.basis, n));
            }
            let oracle = columns_to_matrix(&cols, n);
            let r = curvature.get(&t);
            curvature_matches_oracle &= oracle == r;
            let deviation = r.sub(&PolyMatrix::scalar(self.rank(), &fab));
            pairs.push(PairDeviation { pair: (a, b), curvature: r, deviation, oracle });
        }
        let interior_scalar = pairs.iter().all(|pd| {
            (0..self.rank()).filter(|&c| interior[c]).all(|c| (0..self.rank()).all(|r| pd.deviation.get(r, c).is_zero()))
        });
        let scalar = pairs.iter().all(|pd| pd.deviation.is_zero());
        CurvatureReport {
            pairs,
            interior,
            interior_scalar,
            scalar,
            connection_matches_oracle,
            curvature_matches_oracle,
            unprojected_scalar,
        }
    }

    pub fn to_json(&self, report: &CurvatureReport) -> Value {
        let ring = self.system.ring();
        let mut deviation = Map::new();
        for pd in &report.pairs {
            deviation.insert(format_tuple(&[pd.pair.0, pd.pair.1]), pd.deviation.to_json(ring));
        }
        serde_json::json!({
            "k": self.k,
            "i": self.i,
            "rank": self.rank(),
            "basis": self.basis.iter().map(PbwMonomial::key).collect::<Vec<_>>(),
            "omega": self.connection.omega().iter().map(|m| m.to_json(ring)).collect::<Vec<_>>(),
            "curvature_deviation": deviation,
            "interior": report.interior,
            "interior_scalar": report.interior_scalar,
            "scalar": report.scalar,
            "connection_matches_oracle": report.connection_matches_oracle,
            "curvature_matches_oracle": report.curvature_matches_oracle,
            "unprojected_scalar": report.unprojected_scalar,
        })
    }
}

fn check_class(lr: &LieRinehart, c: &Cochain) -> Result<()> {
    if c.degree() != 2 || c.rank() != lr.rank() || c.nvars() != lr.nvars() {
        return Err(Error::InvalidArgument("expected a 2-cochain on this algebra".into()));
    }
    if !c.is_cocycle(lr) {
        return Err(Error::NotCocycle("class representative".into()));
    }
    Ok(())
}

fn compact(lr: &LieRinehart, c: &Cochain) -> String {
    c.to_json(lr.ring())["values"].to_string()
}

/// Formal image of `c` under `ψ^{k,i}`: a scalar-type atom of rank `r(l,k,i)` with `c₁ = c`.
pub fn psi_formal(lr: &LieRinehart, c: &Cochain, k: usize, i: usize) -> Result<KClass> {
    check_class(lr, c)?;
    if k == 0 || i == 0 {
        return Err(Error::InvalidArgument(format!("k and i must be positive, got k={k}, i={i}")));
    }
    let r = vki_rank(lr.rank(), k, i);
    Ok(KClass::atom(KAtom::new(r, c.clone(), true, format!("psi^{{{k},{i}}}{}", compact(lr, c)))))
}

/// Class of `Λ^d Ṽ^{k,i}(F)` with `F = c / (C(r,d)·d)`, which has `c₁ = c`.
pub fn line_class(lr: &LieRinehart, c: &Cochain, k: usize, i: usize, d: usize) -> Result<KClass> {
    check_class(lr, c)?;
    if k == 0 || i == 0 {
        return Err(Error::InvalidArgument(format!("k and i must be positive, got k={k}, i={i}")));
    }
    let r = vki_rank(lr.rank(), k, i);
    if d == 0 || d as u64 > r {
        return Err(Error::InvalidArgument(format!("exterior power {d} of a rank-{r} module")));
    }
    let rank = binomial(r, d as u64);
    Ok(KClass::atom(KAtom::new(rank, c.clone(), true, format!("L^{{{k},{i}}}_{d}{}", compact(lr, c)))))
}

/// The invertible top power `L^{k,i}(c) = Λ^r Ṽ^{k,i}(c/r)` as a bare atom.
pub fn line_atom(lr: &LieRinehart, c: &Cochain, k: usize, i: usize) -> Result<KAtom> {
    let d = vki_rank(lr.rank(), k, i) as usize;
    Ok(line_class(lr, c, k, i, d)?.as_atom().expect("line classes are single atoms").clone())
}

/// The twist `F = c / (C(r,d)·d)` used for the line class of `c`.
pub fn line_twist(lr: &LieRinehart, c: &Cochain, k: usize, i: usize, d: usize) -> Cochain {
    let r = vki_rank(lr.rank(), k, i);
    let denom = Rational::from_integer((binomial(r, d as u64) * d as u64).into());
    c.scale(&denom.recip())
}

/// Whether a line class certifies that no flat connection exists: its `c₁` is not a coboundary.
pub fn flatness_obstructed(lr: &LieRinehart, line: &KClass, window: u32) -> Result<bool> {
    let zero = Cochain::zero(2, lr.rank(), lr.nvars());
    Ok(!crate::cochain::class_equal(lr, &line.c1(), &zero, window)?)
}
