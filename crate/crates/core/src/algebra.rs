//! Finite-dimensional graded algebras over the rationals.
//!
//! The grading is cohomological: a codimension-`j` cycle class lives in degree
//! `2j`, and odd degrees are available for cohomology models such as abelian
//! varieties. Multiplication is given by structure constants on basis pairs and
//! the top graded piece carries an integration functional (pushforward to a
//! point).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::rational::Rational;

/// Product blocks denser than this are stored as dense tensors.
pub const DENSE_THRESHOLD: f64 = 0.25;

/// A basis vector: graded piece `degree`, position `index` inside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BasisIndex {
    pub degree: usize,
    pub index: usize,
}

impl BasisIndex {
    pub fn new(degree: usize, index: usize) -> Self {
        BasisIndex { degree, index }
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e[{}:{}]", self.degree, self.index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignRule {
    Commutative,
    /// Koszul rule `ab = (-1)^{|a||b|} ba`.
    SuperCommutative,
}

impl SignRule {
    pub fn sign(self, deg_a: usize, deg_b: usize) -> i64 {
        match self {
            SignRule::Commutative => 1,
            SignRule::SuperCommutative if (deg_a * deg_b) % 2 == 1 => -1,
            SignRule::SuperCommutative => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("associativity fails on ({a}, {b}, {c})")]
    AssociativityViolation {
        a: BasisIndex,
        b: BasisIndex,
        c: BasisIndex,
    },
    #[error("sign rule fails on ({a}, {b})")]
    SignRuleViolation { a: BasisIndex, b: BasisIndex },
    #[error("unit law fails on {basis}")]
    UnitViolation { basis: BasisIndex },
}

/// Basis products `e_a * e_b`, each given in coordinates of the graded piece
/// `deg(a) + deg(b)`. Pairs left unset multiply to zero, except that products
/// with the degree-zero basis vector default to the identity action.
#[derive(Clone, Debug, Default)]
pub struct StructureConstants {
    entries: BTreeMap<(BasisIndex, BasisIndex), Vec<Rational>>,
}

impl StructureConstants {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, a: BasisIndex, b: BasisIndex, coords: Vec<Rational>) {
        self.entries.insert((a, b), coords);
    }

    pub fn get(&self, a: BasisIndex, b: BasisIndex) -> Option<&Vec<Rational>> {
        self.entries.get(&(a, b))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Raw input to [`GradedAlgebra::new`].
#[derive(Clone, Debug)]
pub struct AlgebraSpec {
    pub top_degree: usize,
    pub dims: Vec<usize>,
    pub sign_rule: SignRule,
    pub products: StructureConstants,
    /// Coordinates of `1` in the degree-zero piece.
    pub unit: Vec<Rational>,
    /// Linear functional on the top graded piece.
    pub integrate: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum ProductBlock {
    Zero,
    /// `[p][q]` -> sparse coordinates in the target piece
    Sparse(Vec<Vec<Vec<(usize, Rational)>>>),
    /// flat `[p][q][k]`
    Dense { target: usize, data: Vec<Rational> },
}

/// Element of a graded algebra, stored as one coordinate vector per degree.
/// Inhomogeneous elements are formal sums of their graded parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    parts: Vec<Vec<Rational>>,
}

impl Element {
    pub fn zero_with_dims(dims: &[usize]) -> Self {
        Element {
            parts: dims.iter().map(|&d| vec![Rational::zero(); d]).collect(),
        }
    }

    pub fn from_parts(parts: Vec<Vec<Rational>>) -> Self {
        Element { parts }
    }

    pub fn parts(&self) -> &[Vec<Rational>] {
        &self.parts
    }

    pub fn part(&self, degree: usize) -> &[Rational] {
        &self.parts[degree]
    }

    pub fn part_mut(&mut self, degree: usize) -> &mut Vec<Rational> {
        &mut self.parts[degree]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().flatten().all(Zero::is_zero)
    }

    fn part_is_zero(&self, degree: usize) -> bool {
        self.parts[degree].iter().all(Zero::is_zero)
    }

    /// The single degree carrying nonzero coordinates, if there is exactly one.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut nonzero = (0..self.parts.len()).filter(|&d| !self.part_is_zero(d));
        let first = nonzero.next()?;
        nonzero.next().is_none().then_some(first)
    }

    /// True if every part outside `degree` vanishes.
    pub fn is_homogeneous_of(&self, degree: usize) -> bool {
        (0..self.parts.len()).all(|d| d == degree || self.part_is_zero(d))
    }

    pub fn scale(&self, s: &Rational) -> Element {
        Element {
            parts: self
                .parts
                .iter()
                .map(|p| p.iter().map(|v| v * s).collect())
                .collect(),
        }
    }

    pub fn flatten(&self) -> Vec<Rational> {
        self.parts.iter().flatten().cloned().collect()
    }

    pub fn from_flat(dims: &[usize], flat: &[Rational]) -> Element {
        let mut it = flat.iter();
        Element {
            parts: dims
                .iter()
                .map(|&d| it.by_ref().take(d).cloned().collect())
                .collect(),
        }
    }

    fn add_scaled_sparse(&mut self, degree: usize, coeff: &Rational, entries: &[(usize, Rational)]) {
        let part = &mut self.parts[degree];
        for (k, v) in entries {
            part[*k] += coeff * v;
        }
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        assert_eq!(self.dims(), rhs.dims(), "element shapes differ");
        Element {
            parts: self
                .parts
                .iter()
                .zip(&rhs.parts)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self + &(-rhs)
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element {
            parts: self
                .parts
                .iter()
                .map(|p| p.iter().map(|v| -v).collect())
                .collect(),
        }
    }
}

/// Validated graded algebra. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedAlgebra {
    top_degree: usize,
    dims: Vec<usize>,
    offsets: Vec<usize>,
    sign_rule: SignRule,
    blocks: Vec<Vec<ProductBlock>>,
    unit: Element,
    integrate: Vec<Rational>,
}

impl GradedAlgebra {
    /// Builds the algebra and checks shapes, the unit law, the sign rule and
    /// associativity on every basis triple.
    pub fn new(spec: AlgebraSpec) -> Result<Self, AlgebraError> {
        let AlgebraSpec {
            top_degree,
            dims,
            sign_rule,
            mut products,
            unit,
            integrate,
        } = spec;
        if dims.len() != top_degree + 1 {
            return Err(AlgebraError::ShapeMismatch(format!(
                "expected {} graded pieces for top degree {top_degree}, got {}",
                top_degree + 1,
                dims.len()
            )));
        }
        if dims[0] != 1 {
            return Err(AlgebraError::ShapeMismatch(format!(
                "degree-0 piece must be 1-dimensional, got {}",
                dims[0]
            )));
        }
        if unit.len() != 1 {
            return Err(AlgebraError::ShapeMismatch(format!(
                "unit must have 1 coordinate, got {}",
                unit.len()
            )));
        }
        if integrate.len() != dims[top_degree] {
            return Err(AlgebraError::ShapeMismatch(format!(
                "integration functional has {} entries, top piece has dimension {}",
                integrate.len(),
                dims[top_degree]
            )));
        }
        for (&(a, b), coords) in &products.entries {
            for x in [a, b] {
                if x.degree > top_degree || x.index >= dims[x.degree] {
                    return Err(AlgebraError::ShapeMismatch(format!(
                        "basis index {x} out of range in product ({a}, {b})"
                    )));
                }
            }
            let target = a.degree + b.degree;
            if target > top_degree {
                if coords.iter().any(|v| !v.is_zero()) {
                    return Err(AlgebraError::ShapeMismatch(format!(
                        "product ({a}, {b}) exceeds top degree but is nonzero"
                    )));
                }
            } else if coords.len() != dims[target] {
                return Err(AlgebraError::ShapeMismatch(format!(
                    "product ({a}, {b}) has {} coordinates, degree {target} has dimension {}",
                    coords.len(),
                    dims[target]
                )));
            }
        }

        let e0 = BasisIndex::new(0, 0);
        for degree in 0..=top_degree {
            for index in 0..dims[degree] {
                let b = BasisIndex::new(degree, index);
                let mut own = vec![Rational::zero(); dims[degree]];
                own[index] = Rational::one();
                if products.get(e0, b).is_none() {
                    products.set(e0, b, own.clone());
                }
                if products.get(b, e0).is_none() {
                    products.set(b, e0, own);
                }
            }
        }

        let mut offsets = Vec::with_capacity(dims.len());
        let mut acc = 0;
        for &d in &dims {
            offsets.push(acc);
            acc += d;
        }
        let blocks = build_blocks(top_degree, &dims, &products);
        let mut unit_elem = Element::zero_with_dims(&dims);
        unit_elem.parts[0] = unit;
        let alg = GradedAlgebra {
            top_degree,
            dims,
            offsets,
            sign_rule,
            blocks,
            unit: unit_elem,
            integrate,
        };
        alg.check_unit()?;
        alg.check_sign_rule()?;
        alg.check_associativity()?;
        Ok(alg)
    }

    pub fn top_degree(&self) -> usize {
        self.top_degree
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, degree: usize) -> usize {
        self.dims[degree]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn sign_rule(&self) -> SignRule {
        self.sign_rule
    }

    pub fn integration_functional(&self) -> &[Rational] {
        &self.integrate
    }

    pub fn offset(&self, degree: usize) -> usize {
        self.offsets[degree]
    }

    pub fn basis(&self) -> impl Iterator<Item = BasisIndex> + '_ {
        (0..=self.top_degree)
            .flat_map(move |d| (0..self.dims[d]).map(move |i| BasisIndex::new(d, i)))
    }

    pub fn basis_in_degree(&self, degree: usize) -> impl Iterator<Item = BasisIndex> {
        (0..self.dims[degree]).map(move |i| BasisIndex::new(degree, i))
    }

    pub fn flat_index(&self, b: BasisIndex) -> usize {
        self.offsets[b.degree] + b.index
    }

    pub fn zero(&self) -> Element {
        Element::zero_with_dims(&self.dims)
    }

    pub fn unit(&self) -> &Element {
        &self.unit
    }

    pub fn basis_element(&self, b: BasisIndex) -> Element {
        let mut e = self.zero();
        e.parts[b.degree][b.index] = Rational::one();
        e
    }

    pub fn homogeneous(&self, degree: usize, coords: Vec<Rational>) -> Result<Element, AlgebraError> {
        if degree > self.top_degree || coords.len() != self.dims[degree] {
            return Err(AlgebraError::ShapeMismatch(format!(
                "degree {degree} element with {} coordinates",
                coords.len()
            )));
        }
        let mut e = self.zero();
        e.parts[degree] = coords;
        Ok(e)
    }

    pub fn element_from_parts(&self, parts: Vec<Vec<Rational>>) -> Result<Element, AlgebraError> {
        let e = Element::from_parts(parts);
        self.check_shape(&e)?;
        Ok(e)
    }

    pub fn check_shape(&self, e: &Element) -> Result<(), AlgebraError> {
        if e.parts.len() != self.dims.len()
            || e.parts.iter().zip(&self.dims).any(|(p, &d)| p.len() != d)
        {
            return Err(AlgebraError::ShapeMismatch(format!(
                "element shape {:?} does not match dims {:?}",
                e.dims(),
                self.dims
            )));
        }
        Ok(())
    }

    /// `e_a * e_b` as sparse coordinates in degree `deg(a) + deg(b)`.
    pub fn basis_product(&self, a: BasisIndex, b: BasisIndex) -> Vec<(usize, Rational)> {
        match &self.blocks[a.degree][b.degree] {
            ProductBlock::Zero => Vec::new(),
            ProductBlock::Sparse(t) => t[a.index][b.index].clone(),
            ProductBlock::Dense { target, data } => {
                let db = self.dims[b.degree];
                let start = (a.index * db + b.index) * target;
                data[start..start + target]
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(k, v)| (k, v.clone()))
                    .collect()
            }
        }
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element, AlgebraError> {
        self.check_shape(a)?;
        self.check_shape(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub(crate) fn mul_unchecked(&self, a: &Element, b: &Element) -> Element {
        let mut out = self.zero();
        for p in 0..=self.top_degree {
            if a.part_is_zero(p) {
                continue;
            }
            for q in 0..=(self.top_degree - p) {
                if b.part_is_zero(q) || self.blocks[p][q] == ProductBlock::Zero {
                    continue;
                }
                for (i, x) in a.parts[p].iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in b.parts[q].iter().enumerate() {
                        if y.is_zero() {
                            continue;
                        }
                        let coeff = x * y;
                        match &self.blocks[p][q] {
                            ProductBlock::Zero => {}
                            ProductBlock::Sparse(t) => {
                                out.add_scaled_sparse(p + q, &coeff, &t[i][j]);
                            }
                            ProductBlock::Dense { target, data } => {
                                let start = (i * self.dims[q] + j) * target;
                                let part = &mut out.parts[p + q];
                                for (k, v) in data[start..start + target].iter().enumerate() {
                                    if !v.is_zero() {
                                        part[k] += &coeff * v;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// `a^k`, with `a^0 = 1`.
    pub fn power(&self, a: &Element, k: usize) -> Result<Element, AlgebraError> {
        self.check_shape(a)?;
        let mut acc = self.unit.clone();
        for _ in 0..k {
            acc = self.mul_unchecked(&acc, a);
        }
        Ok(acc)
    }

    /// Integrates the top-degree part; lower parts contribute nothing.
    pub fn integrate(&self, a: &Element) -> Rational {
        a.parts[self.top_degree]
            .iter()
            .zip(&self.integrate)
            .fold(Rational::zero(), |acc, (x, w)| acc + x * w)
    }

    /// Intersection pairing `integrate(a * b)`.
    pub fn pair(&self, a: &Element, b: &Element) -> Result<Rational, AlgebraError> {
        Ok(self.integrate(&self.mul(a, b)?))
    }

    /// Gram matrix of the pairing between degree `i` (rows) and its
    /// complement `top - i` (columns).
    pub fn gram(&self, degree: usize) -> Matrix {
        let comp = self.top_degree - degree;
        let mut g = Matrix::zeros(self.dims[degree], self.dims[comp]);
        for a in self.basis_in_degree(degree) {
            for b in self.basis_in_degree(comp) {
                let top: Rational = self
                    .basis_product(a, b)
                    .iter()
                    .fold(Rational::zero(), |acc, (k, v)| acc + v * &self.integrate[*k]);
                g[(a.index, b.index)] = top;
            }
        }
        g
    }

    /// Per-degree nondegeneracy of the pairing.
    pub fn check_poincare(&self) -> PoincareReport {
        let degrees = (0..=self.top_degree)
            .map(|d| {
                let gram = self.gram(d);
                let rank = gram.rank();
                let nondegenerate = gram.is_square() && rank == gram.rows();
                PoincareDegree {
                    degree: d,
                    complement: self.top_degree - d,
                    rank,
                    nondegenerate,
                    gram,
                }
            })
            .collect();
        PoincareReport { degrees }
    }

    fn check_unit(&self) -> Result<(), AlgebraError> {
        for b in self.basis() {
            let e = self.basis_element(b);
            if self.mul_unchecked(&self.unit, &e) != e || self.mul_unchecked(&e, &self.unit) != e {
                return Err(AlgebraError::UnitViolation { basis: b });
            }
        }
        Ok(())
    }

    fn check_sign_rule(&self) -> Result<(), AlgebraError> {
        for a in self.basis() {
            for b in self.basis() {
                if b < a || a.degree + b.degree > self.top_degree {
                    continue;
                }
                let sign = Rational::from_integer(self.sign_rule.sign(a.degree, b.degree).into());
                let ab = sparse_to_dense(&self.basis_product(a, b), self.dims[a.degree + b.degree]);
                let ba = sparse_to_dense(&self.basis_product(b, a), self.dims[a.degree + b.degree]);
                if ab.iter().zip(&ba).any(|(x, y)| *x != y * &sign) {
                    return Err(AlgebraError::SignRuleViolation { a, b });
                }
            }
        }
        Ok(())
    }

    fn check_associativity(&self) -> Result<(), AlgebraError> {
        let basis: Vec<BasisIndex> = self.basis().collect();
        for &a in &basis {
            let ea = self.basis_element(a);
            for &b in &basis {
                if a.degree + b.degree > self.top_degree {
                    continue;
                }
                let eb = self.basis_element(b);
                let ab = self.mul_unchecked(&ea, &eb);
                for &c in &basis {
                    if a.degree + b.degree + c.degree > self.top_degree {
                        continue;
                    }
                    let ec = self.basis_element(c);
                    let left = self.mul_unchecked(&ab, &ec);
                    let bc = self.mul_unchecked(&eb, &ec);
                    let right = self.mul_unchecked(&ea, &bc);
                    if left != right {
                        return Err(AlgebraError::AssociativityViolation { a, b, c });
                    }
                }
            }
        }
        Ok(())
    }
}

fn sparse_to_dense(entries: &[(usize, Rational)], len: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); len];
    for (k, x) in entries {
        v[*k] += x;
    }
    v
}

fn build_blocks(top: usize, dims: &[usize], products: &StructureConstants) -> Vec<Vec<ProductBlock>> {
    let mut blocks = vec![vec![ProductBlock::Zero; top + 1]; top + 1];
    for p in 0..=top {
        for q in 0..=(top - p) {
            let (da, db, dc) = (dims[p], dims[q], dims[p + q]);
            if da == 0 || db == 0 || dc == 0 {
                continue;
            }
            let mut sparse = vec![vec![Vec::new(); db]; da];
            let mut nonzeros = 0usize;
            for (i, row) in sparse.iter_mut().enumerate() {
                for (j, cell) in row.iter_mut().enumerate() {
                    if let Some(coords) = products.get(BasisIndex::new(p, i), BasisIndex::new(q, j)) {
                        *cell = coords
                            .iter()
                            .enumerate()
                            .filter(|(_, v)| !v.is_zero())
                            .map(|(k, v)| (k, v.clone()))
                            .collect();
                        nonzeros += cell.len();
                    }
                }
            }
            if nonzeros == 0 {
                continue;
            }
            let density = nonzeros as f64 / (da * db * dc) as f64;
            blocks[p][q] = if density > DENSE_THRESHOLD {
                let mut data = vec![Rational::zero(); da * db * dc];
                for (i, row) in sparse.iter().enumerate() {
                    for (j, cell) in row.iter().enumerate() {
                        for (k, v) in cell {
                            data[(i * db + j) * dc + k] = v.clone();
                        }
                    }
                }
                ProductBlock::Dense { target: dc, data }
            } else {
                ProductBlock::Sparse(sparse)
            };
        }
    }
    blocks
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoincareDegree {
    pub degree: usize,
    pub complement: usize,
    pub rank: usize,
    pub nondegenerate: bool,
    pub gram: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoincareReport {
    pub degrees: Vec<PoincareDegree>,
}

impl PoincareReport {
    pub fn is_nondegenerate(&self) -> bool {
        self.degrees.iter().all(|d| d.nondegenerate)
    }

    pub fn first_degenerate(&self) -> Option<usize> {
        self.degrees.iter().find(|d| !d.nondegenerate).map(|d| d.degree)
    }
}
