//! Building the model a config describes and running the requested analyses.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::{config_to_value, Analysis, MapConfig, ModelConfig, RunConfig, Violation, ViolationKind};
use crate::algebra::{AlgebraError, Element};
use crate::degrees::{
    bound_constant, check_intersection_bound, delta_table, graph_class, growth_rates, moving_ledger,
    segre_graph_degree, DegreeError, EmbeddedModel,
};
use crate::endomorphism::{MapError, PullbackMap};
use crate::gromov::{gromov_closure, spectral_chain_with, DegreeRadius, MuScope, Realizability, Word};
use crate::linalg::Matrix;
use crate::models::{
    abelian_variety, custom_model, multiprojective, pn_power_map, product_map, projective_space, surface_lattice,
    CustomModelSpec, CustomStage, ModelError,
};
use crate::rational::{round_sig, Rational};
use crate::spectral::SpectralRadius;

use super::config::SCHEMA_VERSION;

/// Exact rational as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rat {
    pub num: String,
    pub den: String,
}

impl From<&Rational> for Rat {
    fn from(q: &Rational) -> Self {
        Rat {
            num: q.numer().to_string(),
            den: q.denom().to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusJson {
    pub rho: f64,
    pub error_bound: f64,
    pub lower: f64,
    pub upper: f64,
}

impl From<&SpectralRadius> for RadiusJson {
    fn from(r: &SpectralRadius) -> Self {
        RadiusJson {
            rho: round_sig(r.rho),
            error_bound: round_sig(r.error_bound),
            lower: round_sig(r.lower),
            upper: round_sig(r.upper),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub kind: String,
    pub dims: Vec<usize>,
    pub dim: usize,
    pub deg_x: Rat,
    pub ambient_dim: Option<usize>,
    pub model_realizability: Realizability,
    pub map_realizability: Realizability,
    pub mu_scope: MuScope,
    pub effective_classes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaTableJson {
    pub max_power: usize,
    /// `rows[j][m - 1] = δ_j(f^m)`.
    pub rows: Vec<Vec<Rat>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthJson {
    pub rates: Vec<f64>,
    pub max: f64,
    pub window: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GromovJson {
    pub dim: usize,
    pub degree_profile: Vec<usize>,
    pub dimension_history: Vec<usize>,
    pub generators: Vec<String>,
    pub certificates: usize,
    pub certificates_verified: bool,
    pub lambda_gr: RadiusJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeRadiusJson {
    pub degree: usize,
    pub dim: usize,
    pub radius: RadiusJson,
}

impl From<&DegreeRadius> for DegreeRadiusJson {
    fn from(d: &DegreeRadius) -> Self {
        DegreeRadiusJson {
            degree: d.degree,
            dim: d.dim,
            radius: (&d.radius).into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceJson {
    pub spectral: f64,
    pub chain_rel: f64,
    pub equality_rel: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainJson {
    pub lambda_gr: RadiusJson,
    pub lambda: Vec<DegreeRadiusJson>,
    pub mu: Vec<DegreeRadiusJson>,
    pub max_lambda: f64,
    pub max_mu: f64,
    pub chi_note: String,
    pub chain_holds: bool,
    pub equality_holds: bool,
    pub equality_asserted: bool,
    pub realizability: Realizability,
    pub mu_scope: MuScope,
    pub tolerances: ToleranceJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub label: String,
    pub coefficient: Rat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphClassJson {
    pub m: usize,
    pub components: Vec<ComponentJson>,
    pub segre_degree: Rat,
    pub segre_closed_form: Option<Rat>,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundPairJson {
    pub v: usize,
    pub w: usize,
    pub pairing: Rat,
    pub deg_v: Rat,
    pub deg_w: Rat,
    pub bound: Rat,
    pub holds: bool,
    pub ledger_bound: Rat,
    pub ledger_within_constant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsJson {
    pub constant: Rat,
    pub pairs: Vec<BoundPairJson>,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingJson {
    pub elapsed_ms: f64,
}

/// Machine-readable result of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub version: String,
    pub config: Value,
    pub model: ModelSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_table: Option<DeltaTableJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth_rates: Option<GrowthJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gromov: Option<GromovJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_class: Option<Vec<GraphClassJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsJson>,
    #[serde(default)]
    pub notes: Vec<String>,
    /// Wall-clock time; only present on request since it breaks
    /// byte-for-byte reproducibility.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<TimingJson>,
}

impl Report {
    /// Canonical text: keys sorted, two-space indentation.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&v).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunError {
    /// Config or model validation failed.
    Invalid(Vec<Violation>),
    /// An analysis on a valid model failed.
    Analysis(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Invalid(v) => {
                let parts: Vec<String> = v.iter().map(|x| format!("{}: {}", x.pointer, x.message)).collect();
                write!(f, "invalid config: {}", parts.join("; "))
            }
            RunError::Analysis(m) => write!(f, "analysis failed: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Invalid(_) => 2,
            RunError::Analysis(_) => 3,
        }
    }
}

/// A model with its map and the provenance of the map.
#[derive(Clone, Debug)]
pub struct BuiltModel {
    pub model: EmbeddedModel,
    pub map: PullbackMap,
    pub realizability: Realizability,
}

fn invalid(pointer: &str, message: impl Into<String>) -> RunError {
    RunError::Invalid(vec![Violation::new(pointer, ViolationKind::SchemaError, message)])
}

fn map_violation(pointer: &str, e: &MapError) -> Violation {
    let mut v = Violation::new(pointer, ViolationKind::SchemaError, e.to_string());
    match e {
        MapError::MultiplicativityViolation { a, b } => v.basis_pair = Some([a.to_string(), b.to_string()]),
        MapError::ShapeMismatch(_) => v.kind = ViolationKind::BadMatrixShape,
        _ => {}
    }
    v
}

fn algebra_pointer(e: &AlgebraError) -> &'static str {
    match e {
        AlgebraError::ShapeMismatch(_) => "/model/dims",
        AlgebraError::UnitViolation { .. } => "/model/unit",
        AlgebraError::AssociativityViolation { .. } | AlgebraError::SignRuleViolation { .. } => "/model/products",
    }
}

fn model_error(e: ModelError, map_pointer: &str) -> RunError {
    let v = match &e {
        ModelError::PermutationShapeMismatch(_) => Violation::new("/map/perm", ViolationKind::SchemaError, e.to_string()),
        ModelError::AmpleClassDegenerate(_) => Violation::new("/model/polarization", ViolationKind::SchemaError, e.to_string()),
        ModelError::NotIsometry => Violation::new("/map/matrix", ViolationKind::SchemaError, e.to_string()),
        ModelError::AmpleNotPositive(_) => Violation::new("/model/ample", ViolationKind::SchemaError, e.to_string()),
        ModelError::Map(m) => map_violation(map_pointer, m),
        ModelError::Algebra(a) => Violation::new(algebra_pointer(a), ViolationKind::SchemaError, e.to_string()),
        _ => Violation::new("/model", ViolationKind::SchemaError, e.to_string()),
    };
    RunError::Invalid(vec![v])
}

fn replace_map(model: &EmbeddedModel, blocks: &[Matrix]) -> Result<PullbackMap, RunError> {
    PullbackMap::new(Arc::clone(model.algebra()), blocks.to_vec())
        .map_err(|e| RunError::Invalid(vec![map_violation("/map/blocks", &e)]))
}

/// Builds and validates the model and map a config describes.
pub fn build(cfg: &RunConfig) -> Result<BuiltModel, RunError> {
    let unsupported = || invalid("/map/kind", format!("map kind not available for {} models", cfg.model.kind()));
    let (model, map, realizability) = match &cfg.model {
        ModelConfig::Projective { n } => {
            let model = projective_space(*n).map_err(|e| model_error(e, "/map"))?;
            let (map, real) = match &cfg.map {
                MapConfig::Power { d } => (pn_power_map(&model, *d).map_err(|e| model_error(e, "/map"))?, model.realizability().clone()),
                MapConfig::Identity => (PullbackMap::identity(Arc::clone(model.algebra())), model.realizability().clone()),
                MapConfig::Matrices { blocks } => (replace_map(&model, blocks)?, Realizability::Unverified),
                _ => return Err(unsupported()),
            };
            (model, map, real)
        }
        ModelConfig::Multiprojective { n } => {
            let model = multiprojective(n).map_err(|e| model_error(e, "/map"))?;
            let (map, real) = match &cfg.map {
                MapConfig::Product { d, perm } => {
                    (product_map(&model, d, perm).map_err(|e| model_error(e, "/map"))?, model.realizability().clone())
                }
                MapConfig::Identity => (PullbackMap::identity(Arc::clone(model.algebra())), model.realizability().clone()),
                MapConfig::Matrices { blocks } => (replace_map(&model, blocks)?, Realizability::Unverified),
                _ => return Err(unsupported()),
            };
            (model, map, real)
        }
        ModelConfig::Abelian { g, polarization } => {
            let n = 2 * g;
            let (h1, real) = match &cfg.map {
                MapConfig::H1 { matrix, realizable: true } => (matrix.clone(), Realizability::builder("abelian_variety")),
                MapConfig::H1 { matrix, realizable: false } => (matrix.clone(), Realizability::Unverified),
                MapConfig::Identity | MapConfig::Matrices { .. } => (Matrix::identity(n), Realizability::builder("abelian_variety")),
                _ => return Err(unsupported()),
            };
            let (model, map) = abelian_variety(*g, &h1, polarization.as_deref(), real.clone())
                .map_err(|e| model_error(e, "/map/matrix"))?;
            match &cfg.map {
                MapConfig::Matrices { blocks } => {
                    let map = replace_map(&model, blocks)?;
                    (model, map, Realizability::Unverified)
                }
                _ => (model, map, real),
            }
        }
        ModelConfig::SurfaceLattice { gram, ample } => {
            let iso = match &cfg.map {
                MapConfig::Isometry { matrix } => matrix.clone(),
                MapConfig::Identity | MapConfig::Matrices { .. } => Matrix::identity(gram.rows()),
                _ => return Err(unsupported()),
            };
            let (model, map) = surface_lattice(gram, &iso, ample).map_err(|e| model_error(e, "/map/matrix"))?;
            let real = model.realizability().clone();
            match &cfg.map {
                MapConfig::Matrices { blocks } => {
                    let map = replace_map(&model, blocks)?;
                    (model, map, Realizability::Unverified)
                }
                _ => (model, map, real),
            }
        }
        ModelConfig::Custom(cc) => {
            let blocks = match &cfg.map {
                MapConfig::Matrices { blocks } => Some(blocks.clone()),
                MapConfig::Identity => None,
                _ => return Err(unsupported()),
            };
            let spec = CustomModelSpec {
                top_degree: cc.top_degree,
                dims: cc.dims.clone(),
                sign_rule: cc.sign_rule,
                products: cc.products.iter().map(|p| (p.a, p.b, p.coords.clone())).collect(),
                unit: cc.unit.clone(),
                integrate: cc.integrate.clone(),
                h: cc.h.clone(),
                ambient_dim: cc.ambient_dim,
                map: blocks,
                effective: cc.effective.clone(),
            };
            let (model, map) = custom_model(&spec).map_err(|(stage, e)| match stage {
                CustomStage::Map => model_error(e, "/map/blocks"),
                CustomStage::Algebra => model_error(e, "/model"),
                CustomStage::Polarization => invalid("/model/h", e.to_string()),
                CustomStage::Effective => invalid("/model/effective", e.to_string()),
            })?;
            let map = map.unwrap_or_else(|| PullbackMap::identity(Arc::clone(model.algebra())));
            (model, map, Realizability::Unverified)
        }
    };
    Ok(BuiltModel {
        model,
        map,
        realizability,
    })
}

pub fn model_summary(b: &BuiltModel) -> ModelSummary {
    let kind = match b.model.kind() {
        crate::degrees::ModelKind::Projective { .. } => "projective",
        crate::degrees::ModelKind::Multiprojective { .. } => "multiprojective",
        crate::degrees::ModelKind::Abelian { .. } => "abelian",
        crate::degrees::ModelKind::SurfaceLattice { .. } => "surface_lattice",
        crate::degrees::ModelKind::Custom => "custom",
    };
    ModelSummary {
        kind: kind.to_string(),
        dims: b.model.algebra().dims().to_vec(),
        dim: b.model.dim(),
        deg_x: b.model.deg_x().into(),
        ambient_dim: b.model.ambient_dim(),
        model_realizability: b.model.realizability().clone(),
        map_realizability: b.realizability.clone(),
        mu_scope: b.model.mu_scope(),
        effective_classes: b.model.effective_classes().len(),
    }
}

fn ample_class(cfg: &RunConfig, model: &EmbeddedModel) -> Result<Element, RunError> {
    match &cfg.ample {
        Some(coords) => model
            .algebra()
            .homogeneous(2, coords.clone())
            .map_err(|e| invalid("/ample", e.to_string())),
        None => Ok(model.h().clone()),
    }
}

fn analysis_err(e: impl std::fmt::Display) -> RunError {
    RunError::Analysis(e.to_string())
}

fn word_label(w: &Word) -> String {
    match w {
        Word::One => "1".into(),
        Word::Omega => "omega".into(),
        Word::Pullback(g) => format!("f*(g{g})"),
        Word::Product(a, b) => format!("g{a}*g{b}"),
    }
}

/// Runs every analysis the config asks for.
pub fn run(cfg: &RunConfig, timing: bool) -> Result<Report, RunError> {
    let start = Instant::now();
    let built = build(cfg)?;
    let omega = ample_class(cfg, &built.model)?;
    let (model, f) = (&built.model, &built.map);
    let mut report = Report {
        schema_version: SCHEMA_VERSION.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config_to_value(cfg),
        model: model_summary(&built),
        delta_table: None,
        growth_rates: None,
        gromov: None,
        chain: None,
        graph_class: None,
        bounds: None,
        notes: Vec::new(),
        timing: None,
    };

    for analysis in &cfg.analyses {
        match analysis {
            Analysis::DeltaTable => {
                let t = delta_table(model, f, cfg.max_power).map_err(analysis_err)?;
                report.delta_table = Some(DeltaTableJson {
                    max_power: t.max_power(),
                    rows: t.rows().iter().map(|r| r.iter().map(Rat::from).collect()).collect(),
                });
                match growth_rates(&t) {
                    Ok(g) => {
                        report.growth_rates = Some(GrowthJson {
                            rates: g.rates.iter().map(|&x| round_sig(x)).collect(),
                            max: round_sig(g.max),
                            window: g.window,
                        })
                    }
                    Err(DegreeError::TooFewPowers(m)) => {
                        report.notes.push(format!("growth rates skipped: M = {m} is below 4"))
                    }
                    Err(e) => return Err(analysis_err(e)),
                }
            }
            Analysis::Gromov => {
                let g = gromov_closure(f, &omega).map_err(analysis_err)?;
                let lambda = g.lambda_gr(cfg.tol).map_err(analysis_err)?;
                report.gromov = Some(GromovJson {
                    dim: g.dim(),
                    degree_profile: g.degree_profile(),
                    dimension_history: g.dimension_history().to_vec(),
                    generators: g.generators().iter().map(word_label).collect(),
                    certificates: g.certificates().len(),
                    certificates_verified: g.verify_certificates(),
                    lambda_gr: (&lambda).into(),
                });
            }
            Analysis::Chain => {
                let c = spectral_chain_with(f, &omega, cfg.tol, built.realizability.clone(), model.mu_scope())
                    .map_err(analysis_err)?;
                report.chain = Some(ChainJson {
                    lambda_gr: (&c.lambda_gr).into(),
                    lambda: c.lambda.iter().map(Into::into).collect(),
                    mu: c.mu.iter().map(Into::into).collect(),
                    max_lambda: round_sig(c.max_lambda),
                    max_mu: round_sig(c.max_mu),
                    chi_note: c.chi_note.clone(),
                    chain_holds: c.chain_holds,
                    equality_holds: c.equality_holds,
                    equality_asserted: c.equality_asserted,
                    realizability: c.realizability.clone(),
                    mu_scope: c.mu_scope,
                    tolerances: ToleranceJson {
                        spectral: c.tolerances.spectral,
                        chain_rel: c.tolerances.chain_rel,
                        equality_rel: c.tolerances.equality_rel,
                    },
                });
                if !c.equality_holds && !c.equality_asserted {
                    report.notes.push(format!(
                        "equality fails for a map with {} realizability; not a contradiction",
                        c.realizability.label()
                    ));
                }
            }
            Analysis::GraphClass => {
                let mut out = Vec::with_capacity(cfg.max_power);
                for m in 1..=cfg.max_power {
                    let comps = graph_class(model, f, m as u64).map_err(analysis_err)?;
                    let segre = segre_graph_degree(model, f, m as u64).map_err(analysis_err)?;
                    out.push(GraphClassJson {
                        m,
                        components: comps
                            .iter()
                            .map(|c| ComponentJson {
                                label: c.label.clone(),
                                coefficient: (&c.coefficient).into(),
                            })
                            .collect(),
                        segre_degree: (&segre.degree).into(),
                        segre_closed_form: segre.closed_form.as_ref().map(Rat::from),
                        consistent: segre.consistent(),
                    });
                }
                report.graph_class = Some(out);
            }
            Analysis::Bounds => {
                let r = model.dim();
                let constant = bound_constant(r, model.deg_x());
                let classes = model.effective_classes();
                let mut pairs = Vec::new();
                for (i, v) in classes.iter().enumerate() {
                    for (j, w) in classes.iter().enumerate().skip(i) {
                        if v.degree() + w.degree() != 2 * r {
                            continue;
                        }
                        let verdict = check_intersection_bound(model, v, w).map_err(analysis_err)?;
                        let ledger = moving_ledger(model.deg_x(), &verdict.deg_v, &verdict.deg_w, r + 1, r)
                            .map_err(analysis_err)?;
                        pairs.push(BoundPairJson {
                            v: i,
                            w: j,
                            pairing: (&verdict.pairing).into(),
                            deg_v: (&verdict.deg_v).into(),
                            deg_w: (&verdict.deg_w).into(),
                            bound: (&verdict.bound).into(),
                            holds: verdict.holds,
                            ledger_within_constant: ledger.final_bound <= verdict.bound,
                            ledger_bound: (&ledger.final_bound).into(),
                        });
                    }
                }
                if classes.is_empty() {
                    report.notes.push("no effective classes declared; bound check is empty".into());
                }
                report.bounds = Some(BoundsJson {
                    constant: (&constant).into(),
                    violations: pairs.iter().filter(|p| !p.holds || !p.ledger_within_constant).count(),
                    pairs,
                });
            }
        }
    }
    if timing {
        report.timing = Some(TimingJson {
            elapsed_ms: round_sig(start.elapsed().as_secs_f64() * 1e3),
        });
    }
    Ok(report)
}
