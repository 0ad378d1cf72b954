//! The Gromov algebra of a self-map: the smallest `f*`-stable subalgebra
//! containing an ample class, and the comparison of its spectral radius with
//! the per-degree spectral radii of `f*`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{BasisIndex, Element, GradedAlgebra};
use crate::endomorphism::{MapError, PullbackMap};
use crate::linalg::Matrix;
use crate::rational::Rational;
use crate::spectral::{spectral_radius, SpectralError, SpectralRadius};

/// Relative slack for the inequality chain.
pub const CHAIN_REL_TOL: f64 = 1e-9;
/// Relative slack for the equality of the top and bottom of the chain.
pub const EQUALITY_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GromovError {
    #[error("ample class must be homogeneous of degree 2")]
    AmpleNotDegreeTwo,
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// How a generator of the closure was produced. Indices refer to earlier
/// generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Word {
    One,
    Omega,
    Pullback(usize),
    Product(usize, usize),
}

/// A basis vector written as a rational combination of generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub terms: Vec<(usize, Rational)>,
}

/// Processing order of closure candidates. The resulting basis is the same
/// for every order; only certificates may differ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateOrder {
    Forward,
    Reverse,
}

#[derive(Clone, Debug)]
struct Row {
    coords: Vec<Rational>,
    pivot: usize,
    expr: BTreeMap<usize, Rational>,
}

/// Per-degree reduced row echelon form with generator bookkeeping.
#[derive(Clone, Debug)]
struct Echelon {
    per_degree: Vec<Vec<Row>>,
}

impl Echelon {
    fn new(top: usize) -> Self {
        Echelon {
            per_degree: vec![Vec::new(); top + 1],
        }
    }

    fn dim(&self) -> usize {
        self.per_degree.iter().map(Vec::len).sum()
    }

    /// Reduces `v` (degree `d`) against the rows; returns the residual and
    /// its expression.
    fn reduce(&self, d: usize, v: &[Rational], id: Option<usize>) -> (Vec<Rational>, BTreeMap<usize, Rational>) {
        let mut v = v.to_vec();
        let mut expr = BTreeMap::new();
        if let Some(id) = id {
            expr.insert(id, Rational::one());
        }
        for row in &self.per_degree[d] {
            let c = v[row.pivot].clone();
            if c.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(&row.coords) {
                *x -= &c * y;
            }
            for (g, coeff) in &row.expr {
                let e = expr.entry(*g).or_insert_with(Rational::zero);
                *e -= &c * coeff;
            }
        }
        expr.retain(|_, c| !c.is_zero());
        (v, expr)
    }

    /// Inserts the candidate if it is new; returns whether it was.
    fn insert(&mut self, d: usize, v: &[Rational], id: usize) -> bool {
        let (mut v, mut expr) = self.reduce(d, v, Some(id));
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[pivot].recip();
        for x in &mut v {
            *x *= &inv;
        }
        for c in expr.values_mut() {
            *c *= &inv;
        }
        for row in &mut self.per_degree[d] {
            let c = row.coords[pivot].clone();
            if c.is_zero() {
                continue;
            }
            for (x, y) in row.coords.iter_mut().zip(&v) {
                *x -= &c * y;
            }
            for (g, coeff) in &expr {
                let e = row.expr.entry(*g).or_insert_with(Rational::zero);
                *e -= &c * coeff;
            }
            row.expr.retain(|_, c| !c.is_zero());
        }
        let pos = self.per_degree[d]
            .iter()
            .position(|r| r.pivot > pivot)
            .unwrap_or(self.per_degree[d].len());
        self.per_degree[d].insert(pos, Row { coords: v, pivot, expr });
        true
    }
}

fn add_candidate(
    word: Word,
    degree: usize,
    value: Element,
    ech: &mut Echelon,
    words: &mut Vec<Word>,
    values: &mut Vec<(usize, Element)>,
) {
    let id = words.len();
    if ech.insert(degree, value.part(degree), id) {
        words.push(word);
        values.push((degree, value));
    }
}

/// Echelonized basis of the `f*`-stable subalgebra generated by `1` and `ω`.
#[derive(Clone, Debug)]
pub struct GromovSubalgebra {
    algebra: Arc<GradedAlgebra>,
    map: PullbackMap,
    omega: Element,
    basis: Vec<Element>,
    pivots: Vec<BasisIndex>,
    generators: Vec<Word>,
    certificates: Vec<Certificate>,
    restricted: Matrix,
    degree_blocks: Vec<Matrix>,
    dimension_history: Vec<usize>,
}

/// Closure of `span{1, ω}` under products and `f*`.
///
/// Each iteration runs one multiplication sweep (products involving
/// generators that have not yet been multiplied) and one pullback sweep
/// (generators not yet pulled back). The loop stops when an iteration adds
/// nothing.
pub fn gromov_closure(
    f: &PullbackMap,
    omega: &Element,
) -> Result<GromovSubalgebra, GromovError> {
    gromov_closure_with_order(f, omega, CandidateOrder::Forward)
}

pub fn gromov_closure_with_order(
    f: &PullbackMap,
    omega: &Element,
    order: CandidateOrder,
) -> Result<GromovSubalgebra, GromovError> {
    let alg = Arc::clone(f.algebra());
    alg.check_shape(omega).map_err(MapError::from)?;
    if alg.top_degree() < 2 || !omega.is_homogeneous_of(2) {
        return Err(GromovError::AmpleNotDegreeTwo);
    }
    let top = alg.top_degree();
    let mut ech = Echelon::new(top);
    let mut words: Vec<Word> = Vec::new();
    let mut values: Vec<(usize, Element)> = Vec::new();


    add_candidate(Word::One, 0, alg.unit().clone(), &mut ech, &mut words, &mut values);
    add_candidate(Word::Omega, 2, omega.clone(), &mut ech, &mut words, &mut values);

    let mut multiplied = 0usize; // generators [0, multiplied) have had all products taken
    let mut pulled = 0usize; // generators [0, pulled) have been pulled back
    let mut history = vec![ech.dim()];
    loop {
        let before = ech.dim();

        let upto = words.len();
        let mut pairs: Vec<(usize, usize)> = (0..upto)
            .flat_map(|j| (0..=j).map(move |i| (i, j)))
            .filter(|&(_, j)| j >= multiplied)
            .collect();
        if order == CandidateOrder::Reverse {
            pairs.reverse();
        }
        for (i, j) in pairs {
            let (di, dj) = (values[i].0, values[j].0);
            if di + dj > top || di == 0 || dj == 0 {
                continue;
            }
            let prod = alg.mul_unchecked(&values[i].1, &values[j].1);
            add_candidate(Word::Product(i, j), di + dj, prod, &mut ech, &mut words, &mut values);
        }
        multiplied = upto;

        let upto = words.len();
        let mut targets: Vec<usize> = (pulled..upto).collect();
        if order == CandidateOrder::Reverse {
            targets.reverse();
        }
        for g in targets {
            let d = values[g].0;
            let image = f.apply_unchecked(&values[g].1);
            add_candidate(Word::Pullback(g), d, image, &mut ech, &mut words, &mut values);
        }
        pulled = upto;

        let after = ech.dim();
        if after == before {
            break;
        }
        history.push(after);
    }

    let mut basis = Vec::new();
    let mut pivots = Vec::new();
    let mut certificates = Vec::new();
    for (d, rows) in ech.per_degree.iter().enumerate() {
        for row in rows {
            basis.push(alg.homogeneous(d, row.coords.clone()).map_err(MapError::from)?);
            pivots.push(BasisIndex::new(d, row.pivot));
            certificates.push(Certificate {
                terms: row.expr.iter().map(|(g, c)| (*g, c.clone())).collect(),
            });
        }
    }

    let n = basis.len();
    let mut restricted = Matrix::zeros(n, n);
    let mut degree_blocks = Vec::with_capacity(top + 1);
    let mut offset = 0;
    for (d, rows) in ech.per_degree.iter().enumerate() {
        let k = rows.len();
        let mut block = Matrix::zeros(k, k);
        for (c, row) in rows.iter().enumerate() {
            let image = f.block(d).mul_vec(&row.coords);
            for (r, target) in rows.iter().enumerate() {
                block[(r, c)] = image[target.pivot].clone();
                restricted[(offset + r, offset + c)] = image[target.pivot].clone();
            }
        }
        degree_blocks.push(block);
        offset += k;
    }

    Ok(GromovSubalgebra {
        algebra: alg,
        map: f.clone(),
        omega: omega.clone(),
        basis,
        pivots,
        generators: words,
        certificates,
        restricted,
        degree_blocks,
        dimension_history: history,
    })
}

impl GromovSubalgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Element] {
        &self.basis
    }

    pub fn pivots(&self) -> &[BasisIndex] {
        &self.pivots
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    pub fn certificates(&self) -> &[Certificate] {
        &self.certificates
    }

    /// Matrix of `f*` on the echelon basis; column `k` is the image of basis
    /// vector `k`.
    pub fn restricted_matrix(&self) -> &Matrix {
        &self.restricted
    }

    pub fn degree_block(&self, degree: usize) -> &Matrix {
        &self.degree_blocks[degree]
    }

    /// Dimension of the subalgebra in each degree.
    pub fn degree_profile(&self) -> Vec<usize> {
        self.degree_blocks.iter().map(Matrix::rows).collect()
    }

    /// Dimension after the seed and after each productive iteration.
    pub fn dimension_history(&self) -> &[usize] {
        &self.dimension_history
    }

    /// Coordinates of `e` on the echelon basis, if `e` lies in the span.
    pub fn coordinates(&self, e: &Element) -> Option<Vec<Rational>> {
        let mut coords = Vec::with_capacity(self.dim());
        let mut residual = e.clone();
        for (b, p) in self.basis.iter().zip(&self.pivots) {
            let c = residual.part(p.degree)[p.index].clone();
            if !c.is_zero() {
                residual = &residual - &b.scale(&c);
            }
            coords.push(c);
        }
        residual.is_zero().then_some(coords)
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.coordinates(e).is_some()
    }

    pub fn contains_unit_and_omega(&self) -> bool {
        self.contains(self.algebra.unit()) && self.contains(&self.omega)
    }

    pub fn is_closed_under_products(&self) -> bool {
        self.basis.iter().all(|a| {
            self.basis
                .iter()
                .all(|b| self.contains(&self.algebra.mul_unchecked(a, b)))
        })
    }

    pub fn is_pullback_stable(&self) -> bool {
        self.basis
            .iter()
            .all(|b| self.contains(&self.map.apply_unchecked(b)))
    }

    /// Re-evaluates every generator word from `1` and `ω` and checks each
    /// certificate reproduces its basis vector exactly.
    pub fn verify_certificates(&self) -> bool {
        let mut values: Vec<Element> = Vec::with_capacity(self.generators.len());
        for word in &self.generators {
            let v = match word {
                Word::One => self.algebra.unit().clone(),
                Word::Omega => self.omega.clone(),
                Word::Pullback(g) => match values.get(*g) {
                    Some(x) => self.map.apply_unchecked(x),
                    None => return false,
                },
                Word::Product(i, j) => match (values.get(*i), values.get(*j)) {
                    (Some(a), Some(b)) => self.algebra.mul_unchecked(a, b),
                    _ => return false,
                },
            };
            values.push(v);
        }
        self.basis.iter().zip(&self.certificates).all(|(b, cert)| {
            let mut acc = self.algebra.zero();
            for (g, c) in &cert.terms {
                acc = &acc + &values[*g].scale(c);
            }
            &acc == b
        })
    }

    /// Spectral radius of `f*` on the subalgebra. The restricted matrix is
    /// block diagonal by degree, so the blocks are handled separately.
    pub fn lambda_gr(&self, tol: f64) -> Result<SpectralRadius, GromovError> {
        let radii = self
            .degree_blocks
            .iter()
            .map(|b| spectral_radius(b, tol))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(max_radius(&radii))
    }
}

pub fn lambda_gr(g: &GromovSubalgebra, tol: f64) -> Result<SpectralRadius, GromovError> {
    g.lambda_gr(tol)
}

fn max_radius(radii: &[SpectralRadius]) -> SpectralRadius {
    let zero = SpectralRadius {
        rho: 0.0,
        error_bound: 0.0,
        lower: 0.0,
        upper: 0.0,
    };
    radii.iter().copied().fold(zero, |acc, r| {
        let lower = acc.lower.max(r.lower);
        let upper = acc.upper.max(r.upper);
        let rho = acc.rho.max(r.rho);
        SpectralRadius {
            rho,
            error_bound: (rho - lower).max(upper - rho),
            lower,
            upper,
        }
    })
}

/// Provenance of the claim that a pullback comes from a morphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Realizability {
    /// A builder vouches for the map being induced by a morphism.
    AssertedByBuilder { builder: String },
    /// Realizable as a lattice isometry only; no full-cohomology claim.
    AssertedForLattice { builder: String },
    Unverified,
}

impl Realizability {
    pub fn builder(name: &str) -> Self {
        Realizability::AssertedByBuilder {
            builder: name.to_string(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Realizability::AssertedByBuilder { .. } => "asserted by builder",
            Realizability::AssertedForLattice { .. } => "asserted for lattice",
            Realizability::Unverified => "unverified",
        }
    }
}

/// Whether the degree-wise radii cover the whole cohomology of the variety.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuScope {
    FullCohomology,
    AlgebraicPartOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeRadius {
    /// Cohomological degree.
    pub degree: usize,
    pub dim: usize,
    pub radius: SpectralRadius,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainTolerances {
    pub spectral: f64,
    pub chain_rel: f64,
    pub equality_rel: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub lambda_gr: SpectralRadius,
    /// Radii on even degrees (algebraic classes of codimension `degree / 2`).
    pub lambda: Vec<DegreeRadius>,
    /// Radii on every degree.
    pub mu: Vec<DegreeRadius>,
    pub max_lambda: f64,
    pub max_mu: f64,
    /// Homological and numerical equivalence coincide in these models, so
    /// the homological radii are not tracked separately.
    pub chi_note: String,
    pub chain_holds: bool,
    pub equality_holds: bool,
    /// True when the equality is a claim (realizable map, full cohomology).
    pub equality_asserted: bool,
    pub realizability: Realizability,
    pub mu_scope: MuScope,
    pub tolerances: ChainTolerances,
}

impl ChainReport {
    fn max_of(radii: &[DegreeRadius]) -> SpectralRadius {
        max_radius(&radii.iter().map(|d| d.radius).collect::<Vec<_>>())
    }

    fn verdicts(&self) -> (bool, bool) {
        let ml = Self::max_of(&self.lambda);
        let mm = Self::max_of(&self.mu);
        let le = |a: &SpectralRadius, b: &SpectralRadius, rel: f64| {
            a.rho <= b.rho + rel * b.rho.max(1.0) + a.error_bound + b.error_bound
        };
        let chain = le(&self.lambda_gr, &ml, self.tolerances.chain_rel)
            && le(&ml, &mm, self.tolerances.chain_rel);
        let gap = (self.lambda_gr.rho - mm.rho).abs();
        let equality = gap
            <= self.tolerances.equality_rel * mm.rho.max(1.0)
                + self.lambda_gr.error_bound
                + mm.error_bound;
        (chain, equality)
    }

    /// Recomputes both verdicts from the recorded values.
    pub fn verdicts_consistent(&self) -> bool {
        self.verdicts() == (self.chain_holds, self.equality_holds)
    }
}

/// Inequality chain for a map whose realizability is not known.
pub fn spectral_chain(
    f: &PullbackMap,
    omega: &Element,
    tol: f64,
) -> Result<ChainReport, GromovError> {
    spectral_chain_with(f, omega, tol, Realizability::Unverified, MuScope::FullCohomology)
}

pub fn spectral_chain_with(
    f: &PullbackMap,
    omega: &Element,
    tol: f64,
    realizability: Realizability,
    mu_scope: MuScope,
) -> Result<ChainReport, GromovError> {
    let closure = gromov_closure(f, omega)?;
    let lambda_gr = closure.lambda_gr(tol)?;
    let alg = f.algebra();
    let mut mu = Vec::new();
    for d in 0..=alg.top_degree() {
        mu.push(DegreeRadius {
            degree: d,
            dim: alg.dim(d),
            radius: spectral_radius(f.block(d), tol)?,
        });
    }
    let lambda: Vec<DegreeRadius> = mu.iter().filter(|r| r.degree % 2 == 0).cloned().collect();
    let equality_asserted = matches!(realizability, Realizability::AssertedByBuilder { .. })
        && mu_scope == MuScope::FullCohomology;
    let mut report = ChainReport {
        lambda_gr,
        max_lambda: ChainReport::max_of(&lambda).rho,
        max_mu: ChainReport::max_of(&mu).rho,
        lambda,
        mu,
        chi_note: "chi_i equals lambda_i: homological and numerical equivalence agree in explicit models"
            .to_string(),
        chain_holds: false,
        equality_holds: false,
        equality_asserted,
        realizability,
        mu_scope,
        tolerances: ChainTolerances {
            spectral: tol,
            chain_rel: CHAIN_REL_TOL,
            equality_rel: EQUALITY_REL_TOL,
        },
    };
    let (chain, equality) = report.verdicts();
    report.chain_holds = chain;
    report.equality_holds = equality;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BasisIndex;
    use crate::models::{abelian_variety, multiprojective, pn_power_map, product_map, projective_space, surface_lattice};
    use crate::rational::int;

    #[test]
    fn pn_closure_is_everything() {
        for n in 1..=4 {
            let p = projective_space(n).unwrap();
            let f = pn_power_map(&p, 2).unwrap();
            let g = gromov_closure(&f, p.h()).unwrap();
            assert_eq!(g.dim(), n + 1);
            assert!(g.verify_certificates());
        }
    }

    #[test]
    fn swap_closure_and_radius() {
        let q = multiprojective(&[1, 1]).unwrap();
        let f = product_map(&q, &[2, 3], &[1, 0]).unwrap();
        let g = gromov_closure(&f, q.h()).unwrap();
        assert_eq!(g.dim(), 4);
        assert_eq!(g.degree_profile(), vec![1, 0, 2, 0, 1]);
        assert_eq!(g.degree_block(4), &Matrix::scalar(1, int(6)));
        // f* on span{h1, h2}
        assert_eq!(g.degree_block(2), &Matrix::from_i64_rows(&[&[0, 3], &[2, 0]]));
        let r = g.lambda_gr(1e-10).unwrap();
        assert!((r.rho - 6.0).abs() < 1e-9);
        assert!(g.is_closed_under_products() && g.is_pullback_stable() && g.contains_unit_and_omega());
        assert!(g.verify_certificates());
    }

    #[test]
    fn fixed_polarization_closes_immediately() {
        let hyp = Matrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        let swap = Matrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        let (model, f) = surface_lattice(&hyp, &swap, &[int(1), int(1)]).unwrap();
        let g = gromov_closure(&f, model.h()).unwrap();
        assert_eq!(g.dim(), 3);
        assert_eq!(g.dimension_history(), &[2, 3]);
    }

    #[test]
    fn p2_radius_is_four() {
        let p = projective_space(2).unwrap();
        let f = pn_power_map(&p, 2).unwrap();
        let g = gromov_closure(&f, p.h()).unwrap();
        assert_eq!(g.restricted_matrix(), &Matrix::from_i64_rows(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 4]]));
        assert!((lambda_gr(&g, 1e-9).unwrap().rho - 4.0).abs() < 1e-9);
        let c = spectral_chain(&f, p.h(), 1e-9).unwrap();
        assert!(c.chain_holds && c.equality_holds);
        assert!(c.verdicts_consistent());
    }

    #[test]
    fn identity_chain_is_all_ones() {
        let (model, _) = abelian_variety(1, &Matrix::identity(2), None, Realizability::Unverified).unwrap();
        let id = PullbackMap::identity(Arc::clone(model.algebra()));
        let c = spectral_chain(&id, model.h(), 1e-9).unwrap();
        assert_eq!(c.lambda_gr.rho, 1.0);
        assert!(c.mu.iter().all(|m| m.radius.rho == 1.0));
    }

    #[test]
    fn fibonacci_abelian_surface() {
        let m = Matrix::from_i64_rows(&[&[1, 0, 1, 0], &[0, 1, 0, 1], &[1, 0, 0, 0], &[0, 1, 0, 0]]);
        let (model, f) = abelian_variety(2, &m, None, Realizability::builder("abelian_variety")).unwrap();
        let c = spectral_chain_with(&f, model.h(), 1e-10, model.realizability().clone(), model.mu_scope()).unwrap();
        let phi2 = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((c.lambda_gr.rho - phi2).abs() < 1e-6);
        assert!((c.max_mu - phi2).abs() < 1e-6);
        assert!(c.equality_asserted && c.equality_holds && c.chain_holds);
        let top_mu = c.mu.iter().max_by(|a, b| a.radius.rho.total_cmp(&b.radius.rho)).unwrap();
        assert_eq!(top_mu.degree, 2);
    }

    #[test]
    fn order_does_not_change_the_basis() {
        let q = multiprojective(&[1, 1, 1]).unwrap();
        let f = product_map(&q, &[2, 3, 1], &[1, 2, 0]).unwrap();
        let a = gromov_closure_with_order(&f, q.h(), CandidateOrder::Forward).unwrap();
        let b = gromov_closure_with_order(&f, q.h(), CandidateOrder::Reverse).unwrap();
        assert_eq!(a.basis(), b.basis());
        assert_eq!(a.restricted_matrix(), b.restricted_matrix());
        assert!(b.verify_certificates());
    }

    #[test]
    fn rejects_odd_polarization() {
        let (model, f) = abelian_variety(1, &Matrix::identity(2), None, Realizability::Unverified).unwrap();
        let e = model.algebra().basis_element(BasisIndex::new(1, 0));
        assert_eq!(gromov_closure(&f, &e).unwrap_err(), GromovError::AmpleNotDegreeTwo);
    }

    #[test]
    fn closure_can_be_proper() {
        // h1 only: the closure stays inside Q[h1]
        let q = multiprojective(&[1, 1]).unwrap();
        let f = product_map(&q, &[2, 2], &[0, 1]).unwrap();
        let h1 = q.algebra().basis_element(BasisIndex::new(2, 0));
        let g = gromov_closure(&f, &h1).unwrap();
        assert_eq!(g.dim(), 2);
        assert!(!g.contains(&q.algebra().basis_element(BasisIndex::new(2, 1))));
    }
}
