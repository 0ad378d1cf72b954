//! Intersection numbers `δ_j(f^m) = h^{r-j} · f^{m*}(h^j)` on an embedded
//! model, the graph-class coefficients they define, and the degree bounds
//! behind the intersection-number estimate.

use std::sync::Arc;

use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Element, GradedAlgebra};
use crate::endomorphism::{MapError, PullbackMap};
use crate::gromov::{MuScope, Realizability};
use crate::rational::{self, Rational};
use crate::spectral::limsup_root;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DegreeError {
    #[error("step k = {k} outside 1..={max}")]
    StepOutOfRange { k: usize, max: usize },
    #[error("classes of degrees {left} and {right} are not complementary in dimension {r}")]
    NonComplementaryDegrees { left: usize, right: usize, r: usize },
    #[error("codimension {j} exceeds dimension {r}")]
    CodimensionOutOfRange { j: usize, r: usize },
    #[error("power m must be at least 1")]
    ZeroPower,
    #[error("growth rates need at least 4 powers, got {0}")]
    TooFewPowers(usize),
    #[error("polarization must be homogeneous of degree 2")]
    PolarizationNotDegreeTwo,
    #[error("polarization has top self-intersection {0}, need a positive value")]
    NonPositiveDegree(String),
    #[error("effective classes must be homogeneous of even degree")]
    NotACycleClass,
    #[error("map and model live on different algebras")]
    AlgebraMismatch,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Which builder produced a model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    Projective { n: usize },
    Multiprojective { ns: Vec<usize> },
    Abelian { g: usize },
    SurfaceLattice { rank: usize },
    Custom,
}

/// A graded algebra together with a very ample class `h`.
#[derive(Clone, Debug)]
pub struct EmbeddedModel {
    algebra: Arc<GradedAlgebra>,
    h: Element,
    r: usize,
    deg_x: Rational,
    ambient_dim: Option<usize>,
    kind: ModelKind,
    realizability: Realizability,
    mu_scope: MuScope,
    effective: Vec<Element>,
}

impl EmbeddedModel {
    /// `deg_X` is read off as `∫ h^r` where `r` is half the top degree.
    pub fn new(
        algebra: Arc<GradedAlgebra>,
        h: Element,
        ambient_dim: Option<usize>,
        kind: ModelKind,
        realizability: Realizability,
    ) -> Result<Self, DegreeError> {
        algebra.check_shape(&h)?;
        if !h.is_homogeneous_of(2) || algebra.top_degree() < 2 {
            return Err(DegreeError::PolarizationNotDegreeTwo);
        }
        let r = algebra.top_degree() / 2;
        let deg_x = algebra.integrate(&algebra.power(&h, r)?);
        if !deg_x.is_positive() {
            return Err(DegreeError::NonPositiveDegree(rational::format_rational(&deg_x)));
        }
        Ok(EmbeddedModel {
            algebra,
            h,
            r,
            deg_x,
            ambient_dim,
            kind,
            realizability,
            mu_scope: MuScope::FullCohomology,
            effective: Vec::new(),
        })
    }

    pub fn with_mu_scope(mut self, scope: MuScope) -> Self {
        self.mu_scope = scope;
        self
    }

    /// Declares classes effective. Effectivity cannot be decided from the
    /// algebra, so this is the caller's word.
    pub fn with_effective(mut self, classes: Vec<Element>) -> Result<Self, DegreeError> {
        for c in &classes {
            self.algebra.check_shape(c)?;
            match c.homogeneous_degree() {
                Some(d) if d % 2 == 0 => {}
                _ => return Err(DegreeError::NotACycleClass),
            }
        }
        self.effective = classes;
        Ok(self)
    }

    pub fn algebra(&self) -> &Arc<GradedAlgebra> {
        &self.algebra
    }

    pub fn h(&self) -> &Element {
        &self.h
    }

    /// Dimension of the variety (half the top degree).
    pub fn dim(&self) -> usize {
        self.r
    }

    pub fn deg_x(&self) -> &Rational {
        &self.deg_x
    }

    pub fn ambient_dim(&self) -> Option<usize> {
        self.ambient_dim
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn realizability(&self) -> &Realizability {
        &self.realizability
    }

    pub fn mu_scope(&self) -> MuScope {
        self.mu_scope
    }

    pub fn effective_classes(&self) -> Vec<EffectiveClass> {
        self.effective
            .iter()
            .map(|e| EffectiveClass {
                degree: e.homogeneous_degree().unwrap_or(0),
                element: e.clone(),
            })
            .collect()
    }

    /// `h^j`, the class of a codimension-`j` linear section.
    pub fn h_power(&self, j: usize) -> Element {
        self.algebra
            .power(&self.h, j)
            .expect("h has the algebra's shape")
    }

    fn check_map(&self, f: &PullbackMap) -> Result<(), DegreeError> {
        if Arc::ptr_eq(&self.algebra, f.algebra()) || self.algebra.dims() == f.algebra().dims() {
            Ok(())
        } else {
            Err(DegreeError::AlgebraMismatch)
        }
    }
}

/// A homogeneous even-degree class the caller vouches is effective.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveClass {
    element: Element,
    degree: usize,
}

impl EffectiveClass {
    pub fn assert_effective(e: Element) -> Result<Self, DegreeError> {
        match e.homogeneous_degree() {
            Some(degree) if degree % 2 == 0 => Ok(EffectiveClass { element: e, degree }),
            _ => Err(DegreeError::NotACycleClass),
        }
    }

    pub fn element(&self) -> &Element {
        &self.element
    }

    /// Cohomological degree (twice the codimension).
    pub fn degree(&self) -> usize {
        self.degree
    }
}

/// `δ_j(f^m)`.
pub fn delta(e: &EmbeddedModel, f: &PullbackMap, m: u64, j: usize) -> Result<Rational, DegreeError> {
    e.check_map(f)?;
    if m == 0 {
        return Err(DegreeError::ZeroPower);
    }
    if j > e.r {
        return Err(DegreeError::CodimensionOutOfRange { j, r: e.r });
    }
    let pulled = f.power(m).apply(&e.h_power(j))?;
    Ok(e.algebra.pair(&e.h_power(e.r - j), &pulled)?)
}

/// Grid `δ_j(f^m)` for `0 <= j <= r`, `1 <= m <= M`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaTable {
    rows: Vec<Vec<Rational>>,
    max_power: usize,
}

impl DeltaTable {
    pub fn get(&self, j: usize, m: usize) -> &Rational {
        &self.rows[j][m - 1]
    }

    /// Row `j`, entry `m - 1` holding `δ_j(f^m)`.
    pub fn row(&self, j: usize) -> &[Rational] {
        &self.rows[j]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn max_power(&self) -> usize {
        self.max_power
    }

    pub fn dim(&self) -> usize {
        self.rows.len() - 1
    }
}

pub fn delta_table(e: &EmbeddedModel, f: &PullbackMap, max_power: usize) -> Result<DeltaTable, DegreeError> {
    e.check_map(f)?;
    if max_power == 0 {
        return Err(DegreeError::ZeroPower);
    }
    let mut rows = Vec::with_capacity(e.r + 1);
    for j in 0..=e.r {
        let dual = e.h_power(e.r - j);
        let mut current = e.h_power(j);
        let mut row = Vec::with_capacity(max_power);
        for _ in 0..max_power {
            current = f.apply(&current)?;
            row.push(e.algebra.pair(&dual, &current)?);
        }
        rows.push(row);
    }
    Ok(DeltaTable { rows, max_power })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRates {
    /// `limsup_m |δ_j(f^m)|^{1/m}` estimated on the tail, one per `j`.
    pub rates: Vec<f64>,
    pub max: f64,
    pub window: usize,
}

/// Tail window used for the limsup estimates.
pub fn growth_window(max_power: usize) -> usize {
    (max_power / 8).max(2)
}

pub fn growth_rates(t: &DeltaTable) -> Result<GrowthRates, DegreeError> {
    if t.max_power < 4 {
        return Err(DegreeError::TooFewPowers(t.max_power));
    }
    let window = growth_window(t.max_power);
    let rates: Vec<f64> = t.rows.iter().map(|row| limsup_root(row, window)).collect();
    let max = rates.iter().copied().fold(0.0, f64::max);
    Ok(GrowthRates { rates, max, window })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphComponent {
    /// `[P^{r-j}] x [P^j]`.
    pub label: String,
    pub j: usize,
    pub coefficient: Rational,
}

/// Coefficients of the graph of `f^m` in the product of linear sections,
/// listed `δ_r(f^m), ..., δ_0(f^m)`.
pub fn graph_class(e: &EmbeddedModel, f: &PullbackMap, m: u64) -> Result<Vec<GraphComponent>, DegreeError> {
    let r = e.r;
    (0..=r)
        .map(|j| {
            Ok(GraphComponent {
                label: format!("[P^{}]x[P^{}]", r - j, j),
                j,
                coefficient: delta(e, f, m, r - j)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegreDegree {
    pub degree: Rational,
    /// `(1 + d^m)^n` when the model is `P^n` and `f* x = d x`.
    pub closed_form: Option<Rational>,
}

impl SegreDegree {
    pub fn consistent(&self) -> bool {
        self.closed_form.as_ref().is_none_or(|c| c == &self.degree)
    }
}

/// Degree of the graph of `f^m` under the Segre embedding of `X x X`:
/// `Σ_j δ_{r-j}(f^m) · C(r, j)`.
pub fn segre_graph_degree(e: &EmbeddedModel, f: &PullbackMap, m: u64) -> Result<SegreDegree, DegreeError> {
    let r = e.r;
    let mut degree = Rational::zero();
    for component in graph_class(e, f, m)? {
        degree += component.coefficient * Rational::from_integer(rational::binomial(r, component.j));
    }
    let closed_form = match e.kind {
        ModelKind::Projective { n } => {
            let d = f.block(2)[(0, 0)].clone();
            let base = Rational::one() + num::pow(d, m as usize);
            Some(num::pow(base, n))
        }
        _ => None,
    };
    Ok(SegreDegree { degree, closed_form })
}

/// `(r + 2) deg_X^{r+1}`.
pub fn bound_constant(r: usize, deg_x: &Rational) -> Rational {
    Rational::from_integer(BigInt::from(r + 2)) * num::pow(deg_x.clone(), r + 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MovingLedger {
    pub k: usize,
    /// Worst-case `deg [V_j]` for `j = 0..=k`.
    pub v_bounds: Vec<Rational>,
    /// `deg [E_j] = deg_X · deg [V_{j-1}]` for `j = 1..=k`.
    pub e_bounds: Vec<Rational>,
    /// `(Σ_{j=1}^k deg [V_{j-1}] + deg [V_{k-1}]) · deg W`.
    pub final_bound: Rational,
}

/// Degree bookkeeping of `k` moving steps on a dimension-`r` variety.
pub fn moving_ledger(
    deg_x: &Rational,
    deg_v: &Rational,
    deg_w: &Rational,
    k: usize,
    r: usize,
) -> Result<MovingLedger, DegreeError> {
    if k == 0 || k > r + 1 {
        return Err(DegreeError::StepOutOfRange { k, max: r + 1 });
    }
    let mut v_bounds = vec![deg_v.clone()];
    let mut e_bounds = Vec::with_capacity(k);
    for j in 1..=k {
        let e = deg_x * &v_bounds[j - 1];
        v_bounds.push(e.clone());
        e_bounds.push(e);
    }
    let mut sum: Rational = v_bounds[..k].iter().sum();
    sum += &v_bounds[k - 1];
    Ok(MovingLedger {
        k,
        v_bounds,
        e_bounds,
        final_bound: sum * deg_w,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionVerdict {
    pub pairing: Rational,
    pub deg_v: Rational,
    pub deg_w: Rational,
    pub constant: Rational,
    pub bound: Rational,
    pub holds: bool,
}

/// `|v · w| <= C deg(v) deg(w)` with `C = (r + 2) deg_X^{r+1}`.
pub fn check_intersection_bound(
    e: &EmbeddedModel,
    v: &EffectiveClass,
    w: &EffectiveClass,
) -> Result<IntersectionVerdict, DegreeError> {
    let r = e.r;
    if v.degree + w.degree != 2 * r {
        return Err(DegreeError::NonComplementaryDegrees {
            left: v.degree,
            right: w.degree,
            r,
        });
    }
    let alg = &e.algebra;
    let pairing = alg.pair(&v.element, &w.element)?;
    let deg_v = alg.pair(&v.element, &e.h_power(r - v.degree / 2))?;
    let deg_w = alg.pair(&w.element, &e.h_power(r - w.degree / 2))?;
    let constant = bound_constant(r, &e.deg_x);
    let bound = &constant * &deg_v * &deg_w;
    let holds = pairing.abs() <= bound;
    Ok(IntersectionVerdict {
        pairing,
        deg_v,
        deg_w,
        constant,
        bound,
        holds,
    })
}
