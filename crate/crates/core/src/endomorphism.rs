//! Pullback maps `f*` as per-degree rational matrices, their powers,
//! pushforwards through the pairing adjoint, and graded traces.

use std::sync::Arc;

use num::Zero;
use thiserror::Error;

use crate::algebra::{AlgebraError, BasisIndex, Element, GradedAlgebra};
use crate::linalg::Matrix;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("pullback does not fix the unit")]
    UnitViolation,
    #[error("multiplicativity fails on ({a}, {b})")]
    MultiplicativityViolation { a: BasisIndex, b: BasisIndex },
    #[error("pairing is degenerate in degree {degree}")]
    DegeneratePairing { degree: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A validated unital graded ring endomorphism `f*`.
///
/// Block `i` is a `dims[i] x dims[i]` matrix whose column `q` holds the
/// coordinates of `f*(e[i:q])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackMap {
    algebra: Arc<GradedAlgebra>,
    blocks: Vec<Matrix>,
}

impl PullbackMap {
    /// Checks shapes, `f*(1) = 1` and `f*(e_a e_b) = f*(e_a) f*(e_b)` on every
    /// basis pair.
    pub fn new(algebra: Arc<GradedAlgebra>, blocks: Vec<Matrix>) -> Result<Self, MapError> {
        if blocks.len() != algebra.dims().len() {
            return Err(MapError::ShapeMismatch(format!(
                "expected {} blocks, got {}",
                algebra.dims().len(),
                blocks.len()
            )));
        }
        for (i, (m, &d)) in blocks.iter().zip(algebra.dims()).enumerate() {
            if m.rows() != d || m.cols() != d {
                return Err(MapError::ShapeMismatch(format!(
                    "block {i} is {}x{}, degree {i} has dimension {d}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        let map = PullbackMap { algebra, blocks };
        map.check_ring_hom()?;
        Ok(map)
    }

    pub fn identity(algebra: Arc<GradedAlgebra>) -> Self {
        let blocks = algebra.dims().iter().map(|&d| Matrix::identity(d)).collect();
        PullbackMap { algebra, blocks }
    }

    pub fn algebra(&self) -> &Arc<GradedAlgebra> {
        &self.algebra
    }

    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }

    pub fn block(&self, degree: usize) -> &Matrix {
        &self.blocks[degree]
    }

    /// Block-diagonal matrix on the whole algebra, basis ordered by degree.
    pub fn full_matrix(&self) -> Matrix {
        let n = self.algebra.total_dim();
        let mut m = Matrix::zeros(n, n);
        for (d, block) in self.blocks.iter().enumerate() {
            let off = self.algebra.offset(d);
            for r in 0..block.rows() {
                for c in 0..block.cols() {
                    m[(off + r, off + c)] = block[(r, c)].clone();
                }
            }
        }
        m
    }

    pub fn apply(&self, e: &Element) -> Result<Element, MapError> {
        self.algebra.check_shape(e)?;
        Ok(self.apply_unchecked(e))
    }

    pub(crate) fn apply_unchecked(&self, e: &Element) -> Element {
        Element::from_parts(
            self.blocks
                .iter()
                .zip(e.parts())
                .map(|(m, p)| m.mul_vec(p))
                .collect(),
        )
    }

    /// `self ∘ other` as pullbacks: first `other`, then `self`, i.e. the
    /// matrix product `self * other` in every degree.
    pub fn compose(&self, other: &PullbackMap) -> PullbackMap {
        assert_eq!(self.algebra.dims(), other.algebra.dims(), "maps on different algebras");
        PullbackMap {
            algebra: Arc::clone(&self.algebra),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a.mul(b))
                .collect(),
        }
    }

    /// `(f^m)*` by repeated squaring of each block. `m = 0` gives the identity.
    pub fn power(&self, m: u64) -> PullbackMap {
        PullbackMap {
            algebra: Arc::clone(&self.algebra),
            blocks: self.blocks.iter().map(|b| b.pow(m)).collect(),
        }
    }

    /// Revalidates the ring homomorphism laws.
    pub fn revalidate(&self) -> Result<(), MapError> {
        self.check_ring_hom()
    }

    /// The unique `f_*` with `pair(f_* a, b) = pair(a, f* b)`, computed degree
    /// by degree as a Gram adjoint.
    pub fn pushforward(&self) -> Result<PushforwardMap, MapError> {
        let alg = &self.algebra;
        let top = alg.top_degree();
        let mut blocks = Vec::with_capacity(top + 1);
        for i in 0..=top {
            let gram = alg.gram(i);
            let inv = gram
                .inverse()
                .ok_or(MapError::DegeneratePairing { degree: i })?;
            // P^T G = G M_{top-i}  =>  P = (G M_{top-i} G^{-1})^T
            let p = gram.mul(&self.blocks[top - i]).mul(&inv).transpose();
            blocks.push(p);
        }
        Ok(PushforwardMap {
            algebra: Arc::clone(alg),
            blocks,
        })
    }

    pub fn graded_trace(&self, degree: usize) -> Rational {
        self.blocks[degree].trace()
    }

    /// `Σ_i Tr(M_i)`
    pub fn plain_trace(&self) -> Rational {
        self.blocks.iter().map(Matrix::trace).fold(Rational::zero(), |a, t| a + t)
    }

    /// `Σ_i (-1)^i Tr(M_i)`, the Lefschetz sign convention.
    pub fn alternating_trace(&self) -> Rational {
        self.blocks
            .iter()
            .enumerate()
            .map(|(i, m)| if i % 2 == 0 { m.trace() } else { -m.trace() })
            .fold(Rational::zero(), |a, t| a + t)
    }

    fn check_ring_hom(&self) -> Result<(), MapError> {
        let alg = &self.algebra;
        let unit_image = self.apply_unchecked(alg.unit());
        if &unit_image != alg.unit() {
            return Err(MapError::UnitViolation);
        }
        let images: Vec<(BasisIndex, Element)> = alg
            .basis()
            .map(|b| (b, self.apply_unchecked(&alg.basis_element(b))))
            .collect();
        for (a, fa) in &images {
            for (b, fb) in &images {
                if a.degree + b.degree > alg.top_degree() {
                    continue;
                }
                let prod = alg.mul_unchecked(&alg.basis_element(*a), &alg.basis_element(*b));
                let lhs = self.apply_unchecked(&prod);
                let rhs = alg.mul_unchecked(fa, fb);
                if lhs != rhs {
                    return Err(MapError::MultiplicativityViolation { a: *a, b: *b });
                }
            }
        }
        Ok(())
    }
}

/// `f_*` realized degree by degree through the pairing adjoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PushforwardMap {
    algebra: Arc<GradedAlgebra>,
    blocks: Vec<Matrix>,
}

impl PushforwardMap {
    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }

    pub fn block(&self, degree: usize) -> &Matrix {
        &self.blocks[degree]
    }

    pub fn apply(&self, e: &Element) -> Result<Element, MapError> {
        self.algebra.check_shape(e)?;
        Ok(Element::from_parts(
            self.blocks
                .iter()
                .zip(e.parts())
                .map(|(m, p)| m.mul_vec(p))
                .collect(),
        ))
    }

    /// Checks the projection formula on every complementary basis pair.
    pub fn satisfies_projection_formula(&self, f: &PullbackMap) -> bool {
        let alg = &self.algebra;
        let top = alg.top_degree();
        alg.basis().all(|a| {
            let ea = alg.basis_element(a);
            let pushed = self.apply(&ea).expect("basis shape");
            alg.basis_in_degree(top - a.degree).all(|b| {
                let eb = alg.basis_element(b);
                let pulled = f.apply_unchecked(&eb);
                alg.pair(&pushed, &eb).expect("shape") == alg.pair(&ea, &pulled).expect("shape")
            })
        })
    }

    pub fn is_identity(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| *b == Matrix::identity(b.rows()))
    }
}
