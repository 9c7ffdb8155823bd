//! Lie–Rinehart algebras `α: L → Der(A)` with `L` free of finite rank over a
//! (Laurent) polynomial ring `A`.
//!
//! A presentation fixes a basis `e_1..e_l` of `L`, the anchor matrix
//! (`α(e_i) = Σ_j anchor[i][j]·∂/∂x_j`) and structure functions
//! `[e_i, e_j] = Σ_k c_ij^k e_k` for `i < j`. Brackets of general elements
//! follow from A-bilinearity corrected by the anchor:
//! `[ξ, a·η] = a[ξ, η] + α(ξ)(a)·η`.

use std::collections::BTreeMap;
use std::ops::Deref;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::arith::{ExponentVector, LaurentPoly, Ring, Variable};
use crate::error::{Error, Result};

/// Seed used for the randomized axiom checks unless a caller overrides it.
pub const DEFAULT_AXIOM_SEED: u64 = 0x5eed;

/// Coordinates of an element of `L` in the chosen basis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LElement(Vec<LaurentPoly>);

impl LElement {
    pub fn new(coords: Vec<LaurentPoly>) -> Self {
        LElement(coords)
    }

    pub fn zero(rank: usize, nvars: usize) -> Self {
        LElement(vec![LaurentPoly::zero(nvars); rank])
    }

    pub fn basis(rank: usize, nvars: usize, i: usize) -> Self {
        let mut v = Self::zero(rank, nvars);
        v.0[i] = LaurentPoly::one(nvars);
        v
    }

    pub fn coords(&self) -> &[LaurentPoly] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(LaurentPoly::is_zero)
    }

    pub fn add(&self, other: &LElement) -> LElement {
        LElement(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LElement) -> LElement {
        LElement(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `a·self` for `a ∈ A`.
    pub fn scale(&self, a: &LaurentPoly) -> LElement {
        LElement(self.0.iter().map(|c| a * c).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    ring: Ring,
    rank: usize,
    anchor: Vec<Vec<LaurentPoly>>,
    bracket: BTreeMap<(usize, usize), LElement>,
}

impl Presentation {
    /// `bracket` is keyed by 0-based pairs `(i, j)` with `i < j`; missing pairs are zero.
    pub fn new(
        ring: Ring,
        rank: usize,
        anchor: Vec<Vec<LaurentPoly>>,
        bracket: BTreeMap<(usize, usize), LElement>,
    ) -> Result<Self> {
        let n = ring.nvars();
        if anchor.len() != rank || anchor.iter().any(|row| row.len() != n) {
            return Err(Error::Schema(format!("anchor must be a {rank}×{n} matrix")));
        }
        for row in &anchor {
            for p in row {
                ring.validate(p)?;
            }
        }
        let mut cleaned = BTreeMap::new();
        for ((i, j), v) in bracket {
            if i >= j || j >= rank {
                return Err(Error::Schema(format!(
                    "bracket key ({},{}) must satisfy 1 ≤ i < j ≤ {rank}",
                    i + 1,
                    j + 1
                )));
            }
            if v.rank() != rank {
                return Err(Error::Schema(format!("bracket ({},{}) needs {rank} coefficients", i + 1, j + 1)));
            }
            for p in v.coords() {
                ring.validate(p)?;
            }
            if !v.is_zero() {
                cleaned.insert((i, j), v);
            }
        }
        Ok(Presentation { ring, rank, anchor, bracket: cleaned })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    pub fn anchor(&self) -> &[Vec<LaurentPoly>] {
        &self.anchor
    }

    pub fn zero_poly(&self) -> LaurentPoly {
        self.ring.zero()
    }

    /// `α(e_i)(a)`.
    pub fn derivation(&self, i: usize, a: &LaurentPoly) -> LaurentPoly {
        let mut out = self.ring.zero();
        for (j, coeff) in self.anchor[i].iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let d = a.partial(j).expect("variable index in range");
            if !d.is_zero() {
                out = &out + &(coeff * &d);
            }
        }
        out
    }

    /// `α(ξ)(a) = Σ_i ξ_i·α(e_i)(a)`.
    pub fn anchor_apply(&self, xi: &LElement, a: &LaurentPoly) -> LaurentPoly {
        let mut out = self.ring.zero();
        for (i, c) in xi.coords().iter().enumerate() {
            if !c.is_zero() {
                out = &out + &(c * &self.derivation(i, a));
            }
        }
        out
    }

    /// `[e_i, e_j]` for any `i, j`, extended by antisymmetry.
    pub fn basis_bracket(&self, i: usize, j: usize) -> LElement {
        let zero = || LElement::zero(self.rank, self.nvars());
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => zero(),
            std::cmp::Ordering::Less => self.bracket.get(&(i, j)).cloned().unwrap_or_else(zero),
            std::cmp::Ordering::Greater => {
                let v = self.bracket.get(&(j, i)).cloned().unwrap_or_else(zero);
                v.scale(&LaurentPoly::from_int(self.nvars(), -1))
            }
        }
    }

    pub fn has_brackets(&self) -> bool {
        !self.bracket.is_empty()
    }

    pub fn bracket(&self, xi: &LElement, eta: &LElement) -> LElement {
        let l = self.rank;
        let mut out = LElement::zero(l, self.nvars());
        for i in 0..l {
            if xi.0[i].is_zero() {
                continue;
            }
            for j in 0..l {
                if eta.0[j].is_zero() || i == j {
                    continue;
                }
                let b = self.basis_bracket(i, j);
                if !b.is_zero() {
                    out = out.add(&b.scale(&(&xi.0[i] * &eta.0[j])));
                }
            }
        }
        for k in 0..l {
            let corr = &self.anchor_apply(xi, &eta.0[k]) - &self.anchor_apply(eta, &xi.0[k]);
            if !corr.is_zero() {
                out.0[k] = &out.0[k] + &corr;
            }
        }
        out
    }

    pub fn basis_element(&self, i: usize) -> LElement {
        LElement::basis(self.rank, self.nvars(), i)
    }

    /// Per-generator multidegree shifts `δ_i` such that `α(e_i)` maps `x^v` into `ℚ·x^{v+δ_i}` and
    /// every structure function `c_ij^k` is a monomial of degree `δ_i + δ_j − δ_k`.
    pub fn grading(&self) -> Result<Vec<ExponentVector>> {
        let n = self.nvars();
        let single = |p: &LaurentPoly| -> Option<ExponentVector> {
            (p.len() == 1).then(|| p.terms().next().unwrap().0.clone())
        };
        let mut deltas = Vec::with_capacity(self.rank);
        for (i, row) in self.anchor.iter().enumerate() {
            let mut delta: Option<Vec<i32>> = None;
            for (j, coeff) in row.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                let exp = single(coeff).ok_or_else(|| {
                    Error::UnsupportedGrading(format!("anchor entry ({},{}) is not a monomial", i + 1, j + 1))
                })?;
                let mut d = exp.entries().to_vec();
                d[j] -= 1;
                match &delta {
                    None => delta = Some(d),
                    Some(prev) if *prev == d => {}
                    Some(_) => {
                        return Err(Error::UnsupportedGrading(format!(
                            "anchor of generator {} is not homogeneous",
                            i + 1
                        )))
                    }
                }
            }
            deltas.push(ExponentVector::new(delta.unwrap_or_else(|| vec![0; n])));
        }
        for (&(i, j), v) in &self.bracket {
            for (k, c) in v.coords().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let exp = single(c).ok_or_else(|| {
                    Error::UnsupportedGrading(format!("structure function c_{}{}^{} is not a monomial", i + 1, j + 1, k + 1))
                })?;
                let want: Vec<i32> = (0..n)
                    .map(|t| deltas[i].entries()[t] + deltas[j].entries()[t] - deltas[k].entries()[t])
                    .collect();
                if exp.entries() != want.as_slice() {
                    return Err(Error::UnsupportedGrading(format!(
                        "structure function c_{}{}^{} has the wrong multidegree",
                        i + 1,
                        j + 1,
                        k + 1
                    )));
                }
            }
        }
        Ok(deltas)
    }

    pub fn to_json(&self) -> Value {
        let fmt = |p: &LaurentPoly| self.ring.format(p);
        let schema = PresentationJson {
            variables: self.ring.variables().to_vec(),
            rank_l: self.rank,
            anchor: self.anchor.iter().map(|row| row.iter().map(fmt).collect()).collect(),
            bracket: self
                .bracket
                .iter()
                .map(|(&(i, j), v)| (format!("{},{}", i + 1, j + 1), v.coords().iter().map(fmt).collect()))
                .collect(),
        };
        serde_json::to_value(schema).expect("presentation serializes")
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let schema: PresentationJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Schema(e.to_string()))?;
        let ring = Ring::new(schema.variables)?;
        let anchor = schema
            .anchor
            .iter()
            .map(|row| row.iter().map(|s| ring.parse(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let mut bracket = BTreeMap::new();
        for (key, coeffs) in &schema.bracket {
            let (i, j) = parse_pair(key)?;
            let coords = coeffs.iter().map(|s| ring.parse(s)).collect::<Result<Vec<_>, _>>()?;
            bracket.insert((i, j), LElement::new(coords));
        }
        Presentation::new(ring, schema.rank_l, anchor, bracket)
    }
}

fn parse_pair(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Schema(format!("bad bracket key `{key}`"));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a - 1, b - 1))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PresentationJson {
    variables: Vec<Variable>,
    #[serde(rename = "rank_L")]
    rank_l: usize,
    anchor: Vec<Vec<String>>,
    #[serde(default)]
    bracket: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: &'static str,
    pub detail: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub seed: u64,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

const LEIBNIZ_SAMPLES: usize = 3;

pub fn check_axioms(p: &Presentation, seed: u64) -> AxiomReport {
    let l = p.rank();
    let n = p.nvars();
    let mut checks = Vec::new();
    let e = |i| p.basis_element(i);

    for i in 0..l {
        for j in (i + 1)..l {
            for k in (j + 1)..l {
                let t1 = p.bracket(&p.bracket(&e(i), &e(j)), &e(k));
                let t2 = p.bracket(&p.bracket(&e(j), &e(k)), &e(i));
                let t3 = p.bracket(&p.bracket(&e(k), &e(i)), &e(j));
                let sum = t1.add(&t2).add(&t3);
                checks.push(AxiomCheck {
                    axiom: "jacobi",
                    detail: format!("(e{}, e{}, e{})", i + 1, j + 1, k + 1),
                    passed: sum.is_zero(),
                });
            }
        }
    }

    for i in 0..l {
        for j in (i + 1)..l {
            let br = p.basis_bracket(i, j);
            let ok = (0..n).all(|t| {
                let x = p.ring().var(t);
                let lhs = &p.derivation(i, &p.derivation(j, &x)) - &p.derivation(j, &p.derivation(i, &x));
                lhs == p.anchor_apply(&br, &x)
            });
            checks.push(AxiomCheck {
                axiom: "anchor-morphism",
                detail: format!("[α(e{0}), α(e{1})] = α([e{0}, e{1}])", i + 1, j + 1),
                passed: ok,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..l {
        for j in 0..l {
            let ok = (0..LEIBNIZ_SAMPLES).all(|_| {
                let a = p.ring().random_poly(&mut rng, 3, 2);
                let lhs = p.bracket(&e(i), &e(j).scale(&a));
                let rhs = p
                    .basis_bracket(i, j)
                    .scale(&a)
                    .add(&e(j).scale(&p.derivation(i, &a)));
                let left_lhs = p.bracket(&e(i).scale(&a), &e(j));
                let left_rhs = p
                    .basis_bracket(i, j)
                    .scale(&a)
                    .sub(&e(i).scale(&p.derivation(j, &a)));
                lhs == rhs && left_lhs == left_rhs
            });
            checks.push(AxiomCheck {
                axiom: "leibniz",
                detail: format!("[e{0}, a·e{1}] and [a·e{0}, e{1}]", i + 1, j + 1),
                passed: ok,
            });
        }
    }

    let antisym = (0..LEIBNIZ_SAMPLES).all(|_| {
        let xi = LElement::new((0..l).map(|_| p.ring().random_poly(&mut rng, 2, 1)).collect());
        let eta = LElement::new((0..l).map(|_| p.ring().random_poly(&mut rng, 2, 1)).collect());
        p.bracket(&xi, &xi).is_zero() && p.bracket(&xi, &eta).add(&p.bracket(&eta, &xi)).is_zero()
    });
    checks.push(AxiomCheck { axiom: "antisymmetry", detail: "random elements".into(), passed: antisym });

    AxiomReport { seed, checks }
}

/// A presentation that passed [`check_axioms`]. Cheap to clone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieRinehart {
    pres: Arc<Presentation>,
    seed: u64,
}

impl LieRinehart {
    pub fn new(pres: Presentation, seed: u64) -> Result<Self> {
        let report = check_axioms(&pres, seed);
        if !report.passed() {
            let failed: Vec<String> = report.failures().map(|c| format!("{} {}", c.axiom, c.detail)).collect();
            return Err(Error::Axioms(failed.join("; ")));
        }
        Ok(LieRinehart { pres: Arc::new(pres), seed })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn axiom_seed(&self) -> u64 {
        self.seed
    }

    pub fn torus(n: usize) -> Result<Self> {
        make_standard(StandardKind::Torus, n)
    }

    pub fn affine(n: usize) -> Result<Self> {
        make_standard(StandardKind::Affine, n)
    }

    pub fn point_abelian(l: usize) -> Result<Self> {
        make_standard(StandardKind::PointAbelian, l)
    }
}

impl Deref for LieRinehart {
    type Target = Presentation;
    fn deref(&self) -> &Presentation {
        &self.pres
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StandardKind {
    /// `ℚ[x_i^{±1}]` with the logarithmic derivations `θ_i = x_i ∂/∂x_i`.
    Torus,
    /// `ℚ[x_i]` with the coordinate derivations `∂/∂x_i`.
    Affine,
    /// `A = ℚ`, `L` abelian of rank `l` with zero anchor.
    PointAbelian,
}

impl std::str::FromStr for StandardKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "torus" => Ok(StandardKind::Torus),
            "affine" => Ok(StandardKind::Affine),
            "point-abelian" => Ok(StandardKind::PointAbelian),
            other => Err(Error::InvalidArgument(format!("unknown built-in algebra `{other}`"))),
        }
    }
}

pub fn make_standard(kind: StandardKind, size: usize) -> Result<LieRinehart> {
    if size == 0 {
        return Err(Error::InvalidArgument("built-in algebras need size ≥ 1".into()));
    }
    let pres = match kind {
        StandardKind::Torus | StandardKind::Affine => {
            let torus = kind == StandardKind::Torus;
            let ring = Ring::standard(size, torus);
            let anchor = (0..size)
                .map(|i| {
                    (0..size)
                        .map(|j| match (i == j, torus) {
                            (false, _) => ring.zero(),
                            (true, true) => ring.var(i),
                            (true, false) => ring.one(),
                        })
                        .collect()
                })
                .collect();
            Presentation::new(ring, size, anchor, BTreeMap::new())?
        }
        StandardKind::PointAbelian => {
            Presentation::new(Ring::new(vec![])?, size, vec![vec![]; size], BTreeMap::new())?
        }
    };
    LieRinehart::new(pres, DEFAULT_AXIOM_SEED)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_theta_action() {
        let t = LieRinehart::torus(2).unwrap();
        let a = t.ring().parse("x^3*y").unwrap();
        // θ_x(x^3 y) = x · ∂/∂x (x^3 y) = x · 3x^2 y
        let expected = &t.ring().var(0) * &t.ring().parse("3*x^2*y").unwrap();
        assert_eq!(t.anchor_apply(&t.basis_element(0), &a), expected);
        assert!(t.anchor_apply(&LElement::zero(2, 2), &a).is_zero());
        let aff = LieRinehart::affine(1).unwrap();
        let x2 = aff.ring().parse("x^2").unwrap();
        assert_eq!(aff.anchor_apply(&aff.basis_element(0), &x2), aff.ring().parse("2*x").unwrap());
    }

    #[test]
    fn brackets_of_standard_algebras() {
        let t = LieRinehart::torus(2).unwrap();
        assert!(t.bracket(&t.basis_element(0), &t.basis_element(1)).is_zero());
        let aff = LieRinehart::affine(1).unwrap();
        let d = aff.basis_element(0);
        let xd = d.scale(&aff.ring().var(0));
        // [∂, x∂] as derivations: applied to x gives ∂(x) - x∂(1) = 1, to x^2 gives 2x; so it is ∂.
        let br = aff.bracket(&d, &xd);
        for probe in ["x", "x^2"] {
            let a = aff.ring().parse(probe).unwrap();
            let oracle = &aff.anchor_apply(&d, &aff.anchor_apply(&xd, &a))
                - &aff.anchor_apply(&xd, &aff.anchor_apply(&d, &a));
            assert_eq!(aff.anchor_apply(&br, &a), oracle);
        }
        assert_eq!(br, d);
        assert!(aff.bracket(&xd, &xd).is_zero());
    }

    #[test]
    fn standard_shapes() {
        let t = LieRinehart::torus(2).unwrap();
        assert_eq!((t.nvars(), t.rank()), (2, 2));
        assert_eq!(t.anchor()[1][1], t.ring().var(1));
        assert!(t.anchor()[0][1].is_zero());
        let p = LieRinehart::point_abelian(2).unwrap();
        assert_eq!((p.nvars(), p.rank()), (0, 2));
        assert!(!p.has_brackets());
        assert!(make_standard(StandardKind::Torus, 0).is_err());
        assert!("nope".parse::<StandardKind>().is_err());
    }

    #[test]
    fn corrupted_torus_fails_anchor_check() {
        let t = LieRinehart::torus(2).unwrap();
        let ring = t.ring().clone();
        let mut br = BTreeMap::new();
        br.insert((0, 1), LElement::basis(2, 2, 0));
        let bad = Presentation::new(ring, 2, t.anchor().to_vec(), br).unwrap();
        let report = check_axioms(&bad, 1);
        assert!(!report.passed());
        assert!(report.failures().any(|c| c.axiom == "anchor-morphism"));
        assert!(matches!(LieRinehart::new(bad, 1), Err(Error::Axioms(_))));
    }

    #[test]
    fn all_builtins_pass() {
        for (kind, sizes) in [
            (StandardKind::Torus, 1..=3),
            (StandardKind::Affine, 1..=3),
            (StandardKind::PointAbelian, 1..=3),
        ] {
            for s in sizes {
                let lr = make_standard(kind, s).unwrap();
                assert!(check_axioms(&lr, 99).passed());
            }
        }
    }

    #[test]
    fn json_round_trip_and_errors() {
        let t = LieRinehart::torus(2).unwrap();
        let v = t.to_json();
        assert_eq!(v["rank_L"], 2);
        assert_eq!(v["anchor"][0][0], "x");
        let back = Presentation::from_json(&v).unwrap();
        assert_eq!(&back, t.presentation());

        let mut bad = v.clone();
        bad["extra"] = Value::Bool(true);
        assert!(Presentation::from_json(&bad).is_err());
        let mut bad_key = v;
        bad_key["bracket"] = serde_json::json!({"2,1": ["1", "0"]});
        assert!(Presentation::from_json(&bad_key).is_err());
    }

    #[test]
    fn grading_of_builtins() {
        let aff = LieRinehart::affine(2).unwrap();
        let g = aff.grading().unwrap();
        assert_eq!(g[0].entries(), &[-1, 0]);
        let t = LieRinehart::torus(2).unwrap();
        assert!(t.grading().unwrap().iter().all(ExponentVector::is_zero));

        // ∂ on the torus: anchor x^0·∂_x is homogeneous; (1 + x)∂_x is not
        let ring = Ring::standard(1, true);
        let anchor = vec![vec![ring.parse("1 + x").unwrap()]];
        let p = Presentation::new(ring, 1, anchor, BTreeMap::new()).unwrap();
        assert!(matches!(p.grading(), Err(Error::UnsupportedGrading(_))));
    }
}
