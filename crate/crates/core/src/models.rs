//! Builders for explicit varieties and their standard self-maps.

use std::collections::HashMap;
use std::sync::Arc;

use num::{BigInt, One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{AlgebraError, AlgebraSpec, BasisIndex, Element, GradedAlgebra, SignRule, StructureConstants};
use crate::degrees::{DegreeError, EmbeddedModel, ModelKind};
use crate::endomorphism::{MapError, PullbackMap};
use crate::gromov::{MuScope, Realizability};
use crate::linalg::{subsets, Matrix};
use crate::rational::{self, int, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("permutation does not match factor dimensions: {0}")]
    PermutationShapeMismatch(String),
    #[error("ample class is degenerate: top power integrates to {0}")]
    AmpleClassDegenerate(String),
    #[error("matrix does not preserve the intersection form")]
    NotIsometry,
    #[error("ample class has self-intersection {0}, need a positive value")]
    AmpleNotPositive(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("expected a {expected} model")]
    WrongModelKind { expected: &'static str },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Degree(#[from] DegreeError),
}

/// `P^n` with `A = Q[x]/(x^{n+1})`, `x` in degree 2.
pub fn projective_space(n: usize) -> Result<EmbeddedModel, ModelError> {
    if n == 0 {
        return Err(ModelError::InvalidParameter("projective space needs n >= 1".into()));
    }
    let alg = Arc::new(multiprojective_algebra(&[n])?.0);
    let h = alg.basis_element(BasisIndex::new(2, 0));
    let effective = (0..=n).map(|j| alg.basis_element(BasisIndex::new(2 * j, 0))).collect();
    Ok(EmbeddedModel::new(
        alg,
        h,
        Some(n),
        ModelKind::Projective { n },
        Realizability::builder("projective_space"),
    )?
    .with_effective(effective)?)
}

/// Pullback of a degree-`d` endomorphism of `P^n`: `x ↦ d x`.
pub fn pn_power_map(model: &EmbeddedModel, d: u64) -> Result<PullbackMap, ModelError> {
    let ModelKind::Projective { n } = *model.kind() else {
        return Err(ModelError::WrongModelKind { expected: "projective" });
    };
    pn_scalar_map(model.algebra(), n, &Rational::from_integer(BigInt::from(d)))
}

/// `x ↦ c x` on `Q[x]/(x^{n+1})` for any rational `c`. Only nonnegative
/// integers come from morphisms.
pub fn pn_scalar_map(alg: &Arc<GradedAlgebra>, n: usize, c: &Rational) -> Result<PullbackMap, ModelError> {
    let blocks = (0..=2 * n)
        .map(|deg| {
            if deg % 2 == 1 {
                Matrix::zeros(0, 0)
            } else {
                Matrix::scalar(1, num::pow(c.clone(), deg / 2))
            }
        })
        .collect();
    Ok(PullbackMap::new(Arc::clone(alg), blocks)?)
}

/// Exponent vectors of the monomial basis, grouped by degree, each degree in
/// descending lexicographic order (so `h_1` comes before `h_2`).
fn monomials(ns: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let r: usize = ns.iter().sum();
    let mut all: Vec<Vec<usize>> = vec![vec![]];
    for &n in ns {
        all = all
            .into_iter()
            .flat_map(|prefix| {
                (0..=n).map(move |a| {
                    let mut v = prefix.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    let mut by_degree = vec![Vec::new(); r + 1];
    for a in all {
        by_degree[a.iter().sum::<usize>()].push(a);
    }
    for group in &mut by_degree {
        group.sort_by(|a, b| b.cmp(a));
    }
    by_degree
}

type MonomialIndex = HashMap<Vec<usize>, BasisIndex>;

fn multiprojective_algebra(ns: &[usize]) -> Result<(GradedAlgebra, MonomialIndex), ModelError> {
    if ns.is_empty() || ns.contains(&0) {
        return Err(ModelError::InvalidParameter(
            "every factor needs dimension at least 1".into(),
        ));
    }
    let by_degree = monomials(ns);
    let r = by_degree.len() - 1;
    let mut dims = vec![0; 2 * r + 1];
    let mut index = MonomialIndex::new();
    for (k, group) in by_degree.iter().enumerate() {
        dims[2 * k] = group.len();
        for (i, a) in group.iter().enumerate() {
            index.insert(a.clone(), BasisIndex::new(2 * k, i));
        }
    }
    let mut products = StructureConstants::new();
    for (a, &ia) in &index {
        for (b, &ib) in &index {
            if ia.degree == 0 || ib.degree == 0 {
                continue;
            }
            let sum: Vec<usize> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            if let Some(&target) = index.get(&sum) {
                let mut coords = vec![Rational::zero(); dims[target.degree]];
                coords[target.index] = Rational::one();
                products.set(ia, ib, coords);
            }
        }
    }
    let alg = GradedAlgebra::new(AlgebraSpec {
        top_degree: 2 * r,
        dims,
        sign_rule: SignRule::Commutative,
        products,
        unit: vec![Rational::one()],
        integrate: vec![Rational::one()],
    })?;
    Ok((alg, index))
}

/// `P^{n_1} x ... x P^{n_k}` embedded by Segre, `h = h_1 + ... + h_k`.
pub fn multiprojective(ns: &[usize]) -> Result<EmbeddedModel, ModelError> {
    let (alg, _) = multiprojective_algebra(ns)?;
    let alg = Arc::new(alg);
    let h_parts = {
        let mut h = alg.zero();
        for c in h.part_mut(2).iter_mut() {
            *c = Rational::one();
        }
        h
    };
    let ambient = ns.iter().map(|n| n + 1).product::<usize>() - 1;
    let effective = alg.basis().map(|b| alg.basis_element(b)).collect();
    Ok(EmbeddedModel::new(
        alg,
        h_parts,
        Some(ambient),
        ModelKind::Multiprojective { ns: ns.to_vec() },
        Realizability::builder("multiprojective"),
    )?
    .with_effective(effective)?)
}

/// `(Σ n_i)! / Π n_i!`, the Segre degree of the product.
pub fn segre_degree(ns: &[usize]) -> BigInt {
    let mut out = rational::factorial(ns.iter().sum());
    for &n in ns {
        out /= rational::factorial(n);
    }
    out
}

/// Pullback of the permuted product of power maps: `h_i ↦ d_i h_{σ(i)}`.
pub fn product_map(model: &EmbeddedModel, d: &[u64], perm: &[usize]) -> Result<PullbackMap, ModelError> {
    let coeffs: Vec<Rational> = d.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect();
    monomial_map(model, &coeffs, perm)
}

/// `h_i ↦ c_i h_{σ(i)}` with arbitrary rational `c_i`. Valid as a ring map
/// for every choice; realizable only for nonnegative integers.
pub fn monomial_map(model: &EmbeddedModel, coeffs: &[Rational], perm: &[usize]) -> Result<PullbackMap, ModelError> {
    let ModelKind::Multiprojective { ns } = model.kind() else {
        return Err(ModelError::WrongModelKind { expected: "multiprojective" });
    };
    let k = ns.len();
    if coeffs.len() != k || perm.len() != k {
        return Err(ModelError::PermutationShapeMismatch(format!(
            "{k} factors, {} degrees, {} permutation entries",
            coeffs.len(),
            perm.len()
        )));
    }
    let mut seen = vec![false; k];
    for (i, &s) in perm.iter().enumerate() {
        if s >= k || seen[s] {
            return Err(ModelError::PermutationShapeMismatch(format!(
                "{perm:?} is not a permutation of 0..{k}"
            )));
        }
        seen[s] = true;
        if ns[i] != ns[s] {
            return Err(ModelError::PermutationShapeMismatch(format!(
                "factor {i} has dimension {} but maps to factor {s} of dimension {}",
                ns[i], ns[s]
            )));
        }
    }
    let alg = model.algebra();
    let by_degree = monomials(ns);
    let mut blocks: Vec<Matrix> = alg.dims().iter().map(|&d| Matrix::zeros(d, d)).collect();
    for (deg, group) in by_degree.iter().enumerate() {
        for (col, a) in group.iter().enumerate() {
            let mut target = vec![0; k];
            let mut scale = Rational::one();
            for i in 0..k {
                target[perm[i]] = a[i];
                scale *= num::pow(coeffs[i].clone(), a[i]);
            }
            let row = group.iter().position(|b| *b == target).expect("permuted monomial");
            blocks[2 * deg][(row, col)] = scale;
        }
    }
    Ok(PullbackMap::new(Arc::clone(alg), blocks)?)
}

/// Sign of the permutation sorting the concatenation of two disjoint sorted
/// index lists.
fn merge_sign(a: &[usize], b: &[usize]) -> i64 {
    let inversions: usize = a.iter().map(|x| b.iter().filter(|y| *y < x).count()).sum();
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Exterior algebra on `2g` degree-one generators, basis `e_S` for subsets
/// `S` in lexicographic order.
pub fn exterior_algebra(g: usize) -> Result<GradedAlgebra, ModelError> {
    if g == 0 {
        return Err(ModelError::InvalidParameter("abelian variety needs g >= 1".into()));
    }
    let n = 2 * g;
    let sets: Vec<Vec<Vec<usize>>> = (0..=n).map(|k| subsets(n, k)).collect();
    let position: HashMap<Vec<usize>, usize> = sets
        .iter()
        .flat_map(|group| group.iter().enumerate().map(|(i, s)| (s.clone(), i)))
        .collect();
    let mut products = StructureConstants::new();
    for p in 1..=n {
        for q in 1..=n - p {
            for (i, s) in sets[p].iter().enumerate() {
                for (j, t) in sets[q].iter().enumerate() {
                    if s.iter().any(|x| t.contains(x)) {
                        continue;
                    }
                    let mut u: Vec<usize> = s.iter().chain(t).copied().collect();
                    u.sort_unstable();
                    let mut coords = vec![Rational::zero(); sets[p + q].len()];
                    coords[position[&u]] = int(merge_sign(s, t));
                    products.set(BasisIndex::new(p, i), BasisIndex::new(q, j), coords);
                }
            }
        }
    }
    Ok(GradedAlgebra::new(AlgebraSpec {
        top_degree: n,
        dims: sets.iter().map(Vec::len).collect(),
        sign_rule: SignRule::SuperCommutative,
        products,
        unit: vec![Rational::one()],
        integrate: vec![Rational::one()],
    })?)
}

/// Coordinates of `Σ_i e_{2i} ∧ e_{2i+1}` in degree 2.
pub fn standard_polarization(g: usize) -> Vec<Rational> {
    subsets(2 * g, 2)
        .iter()
        .map(|s| {
            if s[0] % 2 == 0 && s[1] == s[0] + 1 {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect()
}

/// Cohomology model of a `g`-dimensional abelian variety with the map whose
/// action on `H^1` is `M^T`; degree `k` carries the `k`-th compound.
///
/// `deg_X = ∫ ω^g` with `∫` the raw top-form coefficient. For the standard
/// polarization `ω^g = g! e_{0..2g}`, so the factorial is already inside.
pub fn abelian_variety(
    g: usize,
    m: &Matrix,
    omega: Option<&[Rational]>,
    realizability: Realizability,
) -> Result<(EmbeddedModel, PullbackMap), ModelError> {
    let alg = Arc::new(exterior_algebra(g)?);
    let n = 2 * g;
    if m.rows() != n || m.cols() != n {
        return Err(ModelError::InvalidParameter(format!(
            "H^1 matrix must be {n}x{n}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let omega_coords = match omega {
        Some(c) => c.to_vec(),
        None => standard_polarization(g),
    };
    let omega = alg.homogeneous(2, omega_coords)?;
    let top = alg.integrate(&alg.power(&omega, g)?);
    if top.is_zero() {
        return Err(ModelError::AmpleClassDegenerate(rational::format_rational(&top)));
    }
    let mt = m.transpose();
    let blocks = (0..=n).map(|k| mt.compound(k)).collect();
    let map = PullbackMap::new(Arc::clone(&alg), blocks)?;
    let effective = (0..=g)
        .map(|k| alg.power(&omega, k))
        .collect::<Result<Vec<_>, _>>()?;
    let model = EmbeddedModel::new(alg, omega, None, ModelKind::Abelian { g }, realizability)
        .map_err(|e| match e {
            DegreeError::NonPositiveDegree(v) => ModelError::AmpleClassDegenerate(v),
            other => other.into(),
        })?
        .with_effective(effective)?;
    Ok((model, map))
}

/// Algebraic part `A^0 ⊕ NS ⊕ A^2` of a surface with an automorphism acting
/// on the Néron-Severi lattice by `isometry` (columns are images).
pub fn surface_lattice(
    gram: &Matrix,
    isometry: &Matrix,
    ample: &[Rational],
) -> Result<(EmbeddedModel, PullbackMap), ModelError> {
    let rho = gram.rows();
    if rho == 0 || !gram.is_square() || gram.transpose() != *gram {
        return Err(ModelError::InvalidParameter("gram matrix must be square and symmetric".into()));
    }
    if isometry.rows() != rho || isometry.cols() != rho || ample.len() != rho {
        return Err(ModelError::InvalidParameter(format!(
            "isometry and ample class must match lattice rank {rho}"
        )));
    }
    if isometry.transpose().mul(gram).mul(isometry) != *gram {
        return Err(ModelError::NotIsometry);
    }
    let self_int: Rational = (0..rho)
        .flat_map(|i| (0..rho).map(move |j| (i, j)))
        .map(|(i, j)| &ample[i] * &gram[(i, j)] * &ample[j])
        .sum();
    if !self_int.is_positive() {
        return Err(ModelError::AmpleNotPositive(rational::format_rational(&self_int)));
    }
    let mut products = StructureConstants::new();
    for i in 0..rho {
        for j in 0..rho {
            products.set(BasisIndex::new(2, i), BasisIndex::new(2, j), vec![gram[(i, j)].clone()]);
        }
    }
    let alg = Arc::new(GradedAlgebra::new(AlgebraSpec {
        top_degree: 4,
        dims: vec![1, 0, rho, 0, 1],
        sign_rule: SignRule::Commutative,
        products,
        unit: vec![Rational::one()],
        integrate: vec![Rational::one()],
    })?);
    let blocks = vec![
        Matrix::identity(1),
        Matrix::zeros(0, 0),
        isometry.clone(),
        Matrix::zeros(0, 0),
        Matrix::identity(1),
    ];
    let map = PullbackMap::new(Arc::clone(&alg), blocks)?;
    let h = alg.homogeneous(2, ample.to_vec())?;
    let effective = vec![alg.unit().clone(), h.clone(), alg.basis_element(BasisIndex::new(4, 0))];
    let model = EmbeddedModel::new(
        alg,
        h,
        None,
        ModelKind::SurfaceLattice { rank: rho },
        Realizability::AssertedForLattice {
            builder: "surface_lattice".into(),
        },
    )?
    .with_mu_scope(MuScope::AlgebraicPartOnly)
    .with_effective(effective)?;
    Ok((model, map))
}

/// Hand-supplied algebra, polarization, optional map and effective classes.
#[derive(Clone, Debug, PartialEq)]
pub struct CustomModelSpec {
    pub top_degree: usize,
    pub dims: Vec<usize>,
    pub sign_rule: SignRule,
    pub products: Vec<(BasisIndex, BasisIndex, Vec<Rational>)>,
    pub unit: Vec<Rational>,
    pub integrate: Vec<Rational>,
    /// Degree-2 coordinates of the polarization.
    pub h: Vec<Rational>,
    pub ambient_dim: Option<usize>,
    /// Per-degree pullback blocks, columns are images of basis vectors.
    pub map: Option<Vec<Matrix>>,
    /// Each class given as `(degree, coordinates)`.
    pub effective: Vec<(usize, Vec<Rational>)>,
}

/// Where a custom-model failure originated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CustomStage {
    Algebra,
    Polarization,
    Map,
    Effective,
}

pub fn custom_model(
    spec: &CustomModelSpec,
) -> Result<(EmbeddedModel, Option<PullbackMap>), (CustomStage, ModelError)> {
    let mut products = StructureConstants::new();
    for (a, b, coords) in &spec.products {
        products.set(*a, *b, coords.clone());
    }
    let alg = GradedAlgebra::new(AlgebraSpec {
        top_degree: spec.top_degree,
        dims: spec.dims.clone(),
        sign_rule: spec.sign_rule,
        products,
        unit: spec.unit.clone(),
        integrate: spec.integrate.clone(),
    })
    .map_err(|e| (CustomStage::Algebra, e.into()))?;
    let alg = Arc::new(alg);
    let h = if spec.top_degree >= 2 {
        alg.homogeneous(2, spec.h.clone())
            .map_err(|e| (CustomStage::Polarization, e.into()))?
    } else {
        return Err((
            CustomStage::Polarization,
            DegreeError::PolarizationNotDegreeTwo.into(),
        ));
    };
    let effective = spec
        .effective
        .iter()
        .map(|(d, c)| alg.homogeneous(*d, c.clone()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| (CustomStage::Effective, e.into()))?;
    let model = EmbeddedModel::new(
        Arc::clone(&alg),
        h,
        spec.ambient_dim,
        ModelKind::Custom,
        Realizability::Unverified,
    )
    .map_err(|e| (CustomStage::Polarization, e.into()))?
    .with_effective(effective)
    .map_err(|e| (CustomStage::Effective, e.into()))?;
    let map = match &spec.map {
        Some(blocks) => Some(
            PullbackMap::new(alg, blocks.clone()).map_err(|e| (CustomStage::Map, e.into()))?,
        ),
        None => None,
    };
    Ok((model, map))
}

/// The element `Σ c_i h_i` of degree 2 from its coordinates.
pub fn degree_two(model: &EmbeddedModel, coords: &[Rational]) -> Result<Element, ModelError> {
    Ok(model.algebra().homogeneous(2, coords.to_vec())?)
}
