//! Run configuration: JSON parsing with exhaustive validation, and the
//! canonical serialization it round-trips through.

use num::{BigInt, Zero};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::algebra::{BasisIndex, SignRule};
use crate::linalg::{subsets, Matrix};
use crate::rational::{self, Rational};

pub const SCHEMA_VERSION: &str = "1";
pub const DEFAULT_MAX_POWER: usize = 16;
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    SchemaError,
    UnknownModelKind,
    BadMatrixShape,
}

/// One problem with a config, located by JSON pointer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub pointer: String,
    pub kind: ViolationKind,
    pub message: String,
    /// Offending basis pair, for maps that fail multiplicativity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_pair: Option<[String; 2]>,
}

impl Violation {
    pub fn new(pointer: &str, kind: ViolationKind, message: impl Into<String>) -> Self {
        Violation {
            pointer: pointer.to_string(),
            kind,
            message: message.into(),
            basis_pair: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Analysis {
    DeltaTable,
    Gromov,
    Chain,
    GraphClass,
    Bounds,
}

impl Analysis {
    pub const ALL: [Analysis; 5] = [
        Analysis::DeltaTable,
        Analysis::Gromov,
        Analysis::Chain,
        Analysis::GraphClass,
        Analysis::Bounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Analysis::DeltaTable => "delta-table",
            Analysis::Gromov => "gromov",
            Analysis::Chain => "chain",
            Analysis::GraphClass => "graph-class",
            Analysis::Bounds => "bounds",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductEntry {
    pub a: BasisIndex,
    pub b: BasisIndex,
    pub coords: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CustomConfig {
    pub top_degree: usize,
    pub dims: Vec<usize>,
    pub sign_rule: SignRule,
    pub products: Vec<ProductEntry>,
    pub unit: Vec<Rational>,
    pub integrate: Vec<Rational>,
    pub h: Vec<Rational>,
    pub ambient_dim: Option<usize>,
    pub effective: Vec<(usize, Vec<Rational>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelConfig {
    Projective { n: usize },
    Multiprojective { n: Vec<usize> },
    Abelian { g: usize, polarization: Option<Vec<Rational>> },
    SurfaceLattice { gram: Matrix, ample: Vec<Rational> },
    Custom(CustomConfig),
}

impl ModelConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelConfig::Projective { .. } => "projective",
            ModelConfig::Multiprojective { .. } => "multiprojective",
            ModelConfig::Abelian { .. } => "abelian",
            ModelConfig::SurfaceLattice { .. } => "surface_lattice",
            ModelConfig::Custom(_) => "custom",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MapConfig {
    Power { d: u64 },
    Product { d: Vec<u64>, perm: Vec<usize> },
    Identity,
    /// Action on `H^1` of an abelian variety.
    H1 { matrix: Matrix, realizable: bool },
    Isometry { matrix: Matrix },
    /// One block per degree.
    Matrices { blocks: Vec<Matrix> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub map: MapConfig,
    /// Degree-2 coordinates of the class used for the Gromov algebra;
    /// defaults to the model's polarization.
    pub ample: Option<Vec<Rational>>,
    pub analyses: Vec<Analysis>,
    pub max_power: usize,
    pub tol: f64,
    pub output: Option<String>,
}

struct Checker {
    violations: Vec<Violation>,
}

impl Checker {
    fn push(&mut self, pointer: &str, kind: ViolationKind, message: impl Into<String>) {
        self.violations.push(Violation::new(pointer, kind, message));
    }

    fn schema(&mut self, pointer: &str, message: impl Into<String>) {
        self.push(pointer, ViolationKind::SchemaError, message);
    }

    fn object<'a>(&mut self, v: &'a Value, ptr: &str) -> Option<&'a Map<String, Value>> {
        let o = v.as_object();
        if o.is_none() {
            self.schema(ptr, "expected an object");
        }
        o
    }

    fn known_keys(&mut self, o: &Map<String, Value>, ptr: &str, allowed: &[&str]) {
        for key in o.keys() {
            if !allowed.contains(&key.as_str()) {
                self.schema(&format!("{ptr}/{}", escape(key)), "unknown field");
            }
        }
    }

    fn required<'a>(&mut self, o: &'a Map<String, Value>, ptr: &str, key: &str) -> Option<&'a Value> {
        let v = o.get(key);
        if v.is_none() {
            self.schema(&format!("{ptr}/{key}"), "missing required field");
        }
        v
    }

    fn usize_at(&mut self, v: &Value, ptr: &str, min: usize) -> Option<usize> {
        match v.as_u64() {
            Some(x) if x as usize >= min => Some(x as usize),
            Some(_) => {
                self.schema(ptr, format!("must be at least {min}"));
                None
            }
            None => {
                self.schema(ptr, "expected a nonnegative integer");
                None
            }
        }
    }

    fn rational_at(&mut self, v: &Value, ptr: &str) -> Option<Rational> {
        let parsed = match v {
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Some(Rational::from_integer(BigInt::from(i)))
                } else if let Some(u) = n.as_u64() {
                    Some(Rational::from_integer(BigInt::from(u)))
                } else {
                    rational::parse_rational(&n.to_string())
                }
            }
            Value::String(s) => rational::parse_rational(s),
            Value::Object(o) => match (o.get("num"), o.get("den"), o.len()) {
                (Some(Value::String(n)), Some(Value::String(d)), 2) => {
                    match (n.parse::<BigInt>(), d.parse::<BigInt>()) {
                        (Ok(n), Ok(d)) if !d.is_zero() => Some(Rational::new(n, d)),
                        _ => None,
                    }
                }
                _ => None,
            },
            _ => None,
        };
        if parsed.is_none() {
            self.schema(ptr, "expected a rational: integer, \"a/b\" string or {\"num\",\"den\"}");
        }
        parsed
    }

    fn array<'a>(&mut self, v: &'a Value, ptr: &str) -> Option<&'a Vec<Value>> {
        let a = v.as_array();
        if a.is_none() {
            self.schema(ptr, "expected an array");
        }
        a
    }

    fn rationals_at(&mut self, v: &Value, ptr: &str, len: Option<usize>) -> Option<Vec<Rational>> {
        let a = self.array(v, ptr)?;
        if let Some(n) = len {
            if a.len() != n {
                self.push(ptr, ViolationKind::BadMatrixShape, format!("expected {n} entries, got {}", a.len()));
                return None;
            }
        }
        let out: Vec<Option<Rational>> = a
            .iter()
            .enumerate()
            .map(|(i, x)| self.rational_at(x, &format!("{ptr}/{i}")))
            .collect();
        out.into_iter().collect()
    }

    fn usizes_at(&mut self, v: &Value, ptr: &str, min: usize) -> Option<Vec<usize>> {
        let a = self.array(v, ptr)?;
        let out: Vec<Option<usize>> = a
            .iter()
            .enumerate()
            .map(|(i, x)| self.usize_at(x, &format!("{ptr}/{i}"), min))
            .collect();
        out.into_iter().collect()
    }

    /// Matrix given as a list of rows.
    fn matrix_at(&mut self, v: &Value, ptr: &str, shape: Option<(usize, usize)>) -> Option<Matrix> {
        let rows = self.array(v, ptr)?;
        let mut parsed = Vec::with_capacity(rows.len());
        let mut ok = true;
        for (i, row) in rows.iter().enumerate() {
            match self.rationals_at(row, &format!("{ptr}/{i}"), None) {
                Some(r) => parsed.push(r),
                None => ok = false,
            }
        }
        if !ok {
            return None;
        }
        let cols = parsed.first().map_or(0, Vec::len);
        if parsed.iter().any(|r| r.len() != cols) {
            self.push(ptr, ViolationKind::BadMatrixShape, "rows have different lengths");
            return None;
        }
        let m = if parsed.is_empty() {
            Matrix::zeros(0, 0)
        } else {
            Matrix::from_rows(parsed)?
        };
        if let Some((r, c)) = shape {
            if (m.rows(), m.cols()) != (r, c) {
                self.push(
                    ptr,
                    ViolationKind::BadMatrixShape,
                    format!("expected {r}x{c}, got {}x{}", m.rows(), m.cols()),
                );
                return None;
            }
        }
        Some(m)
    }

    fn basis_index_at(&mut self, v: &Value, ptr: &str) -> Option<BasisIndex> {
        let pair = self.usizes_at(v, ptr, 0)?;
        if pair.len() != 2 {
            self.schema(ptr, "basis index is [degree, index]");
            return None;
        }
        Some(BasisIndex::new(pair[0], pair[1]))
    }
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

/// Parses and validates a config. On failure every violation found is
/// returned, each with its JSON pointer.
pub fn parse_config(text: &str) -> Result<RunConfig, Vec<Violation>> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        vec![Violation::new("", ViolationKind::SchemaError, format!("invalid JSON: {e}"))]
    })?;
    config_from_value(&value)
}

pub fn config_from_value(value: &Value) -> Result<RunConfig, Vec<Violation>> {
    let mut c = Checker { violations: Vec::new() };
    let config = check_root(&mut c, value);
    match config {
        Some(cfg) if c.violations.is_empty() => Ok(cfg),
        _ => {
            if c.violations.is_empty() {
                c.schema("", "invalid config");
            }
            Err(c.violations)
        }
    }
}

fn check_root(c: &mut Checker, value: &Value) -> Option<RunConfig> {
    let root = c.object(value, "")?;
    c.known_keys(root, "", &["schema_version", "model", "map", "ample", "analyses", "M", "tol", "output"]);
    if let Some(v) = root.get("schema_version") {
        if v.as_str() != Some(SCHEMA_VERSION) {
            c.schema("/schema_version", format!("only schema version \"{SCHEMA_VERSION}\" is supported"));
        }
    }
    let model = c.required(root, "", "model").and_then(|m| check_model(c, m));
    let map = c
        .required(root, "", "map")
        .and_then(|m| check_map(c, m, model.as_ref()));
    let ample = match root.get("ample") {
        Some(v) => {
            let len = model.as_ref().and_then(degree_two_dim);
            Some(c.rationals_at(v, "/ample", len))
        }
        None => None,
    };
    let analyses = match root.get("analyses") {
        Some(v) => c.array(v, "/analyses").map(|items| {
            let mut out = Vec::new();
            for (i, item) in items.iter().enumerate() {
                match item.as_str().and_then(Analysis::parse) {
                    Some(a) if !out.contains(&a) => out.push(a),
                    Some(_) => c.schema(&format!("/analyses/{i}"), "duplicate analysis"),
                    None => c.schema(
                        &format!("/analyses/{i}"),
                        "expected one of delta-table, gromov, chain, graph-class, bounds",
                    ),
                }
            }
            out.sort();
            out
        }),
        None => Some(Analysis::ALL.to_vec()),
    };
    let max_power = match root.get("M") {
        Some(v) => c.usize_at(v, "/M", 1),
        None => Some(DEFAULT_MAX_POWER),
    };
    let tol = match root.get("tol") {
        Some(v) => match v.as_f64() {
            Some(t) if t > 0.0 && t.is_finite() => Some(t),
            _ => {
                c.schema("/tol", "expected a positive number");
                None
            }
        },
        None => Some(DEFAULT_TOL),
    };
    let output = match root.get("output") {
        Some(Value::String(s)) => Some(Some(s.clone())),
        Some(_) => {
            c.schema("/output", "expected a path string");
            None
        }
        None => Some(None),
    };
    Some(RunConfig {
        model: model?,
        map: map?,
        ample: match ample {
            Some(a) => Some(a?),
            None => None,
        },
        analyses: analyses?,
        max_power: max_power?,
        tol: tol?,
        output: output?,
    })
}

/// Dimension of the degree-2 piece, when it can be read off the config.
fn degree_two_dim(model: &ModelConfig) -> Option<usize> {
    match model {
        ModelConfig::Projective { .. } => Some(1),
        ModelConfig::Multiprojective { n } => Some(n.len()),
        ModelConfig::Abelian { g, .. } => Some(subsets(2 * g, 2).len()),
        ModelConfig::SurfaceLattice { gram, .. } => Some(gram.rows()),
        ModelConfig::Custom(cc) => cc.dims.get(2).copied(),
    }
}

fn check_model(c: &mut Checker, v: &Value) -> Option<ModelConfig> {
    let o = c.object(v, "/model")?;
    let kind = c.required(o, "/model", "kind")?;
    let Some(kind) = kind.as_str() else {
        c.schema("/model/kind", "expected a string");
        return None;
    };
    match kind {
        "projective" => {
            c.known_keys(o, "/model", &["kind", "n"]);
            let n = c.required(o, "/model", "n").and_then(|n| c.usize_at(n, "/model/n", 1))?;
            Some(ModelConfig::Projective { n })
        }
        "multiprojective" => {
            c.known_keys(o, "/model", &["kind", "n"]);
            let n = c.required(o, "/model", "n").and_then(|n| c.usizes_at(n, "/model/n", 1))?;
            if n.is_empty() {
                c.schema("/model/n", "need at least one factor");
                return None;
            }
            Some(ModelConfig::Multiprojective { n })
        }
        "abelian" => {
            c.known_keys(o, "/model", &["kind", "g", "polarization"]);
            let g = c.required(o, "/model", "g").and_then(|g| c.usize_at(g, "/model/g", 1))?;
            let polarization = match o.get("polarization") {
                Some(p) => Some(c.rationals_at(p, "/model/polarization", Some(subsets(2 * g, 2).len()))?),
                None => None,
            };
            Some(ModelConfig::Abelian { g, polarization })
        }
        "surface_lattice" => {
            c.known_keys(o, "/model", &["kind", "gram", "ample"]);
            let gram = c.required(o, "/model", "gram").and_then(|g| c.matrix_at(g, "/model/gram", None));
            let gram = gram.and_then(|g| {
                if g.is_square() && g.rows() > 0 {
                    Some(g)
                } else {
                    c.push("/model/gram", ViolationKind::BadMatrixShape, "gram matrix must be square and nonempty");
                    None
                }
            });
            let len = gram.as_ref().map(Matrix::rows);
            let ample = c
                .required(o, "/model", "ample")
                .and_then(|a| c.rationals_at(a, "/model/ample", len));
            Some(ModelConfig::SurfaceLattice { gram: gram?, ample: ample? })
        }
        "custom" => check_custom(c, o).map(ModelConfig::Custom),
        other => {
            c.push(
                "/model/kind",
                ViolationKind::UnknownModelKind,
                format!("unknown model kind \"{other}\""),
            );
            None
        }
    }
}

fn check_custom(c: &mut Checker, o: &Map<String, Value>) -> Option<CustomConfig> {
    let p = "/model";
    c.known_keys(
        o,
        p,
        &["kind", "top_degree", "dims", "sign_rule", "products", "unit", "integrate", "h", "ambient_dim", "effective"],
    );
    let top_degree = c.required(o, p, "top_degree").and_then(|v| c.usize_at(v, "/model/top_degree", 2));
    let dims = c.required(o, p, "dims").and_then(|v| c.usizes_at(v, "/model/dims", 0));
    if let (Some(t), Some(d)) = (top_degree, dims.as_ref()) {
        if d.len() != t + 1 {
            c.push("/model/dims", ViolationKind::BadMatrixShape, format!("expected {} entries", t + 1));
        }
    }
    let sign_rule = match o.get("sign_rule").map(|v| v.as_str()) {
        None | Some(Some("commutative")) => Some(SignRule::Commutative),
        Some(Some("super_commutative")) => Some(SignRule::SuperCommutative),
        _ => {
            c.schema("/model/sign_rule", "expected \"commutative\" or \"super_commutative\"");
            None
        }
    };
    let products = c.required(o, p, "products").and_then(|v| {
        let items = c.array(v, "/model/products")?;
        let mut out = Vec::new();
        let mut ok = true;
        for (i, item) in items.iter().enumerate() {
            let ptr = format!("/model/products/{i}");
            let Some(e) = c.object(item, &ptr) else {
                ok = false;
                continue;
            };
            c.known_keys(e, &ptr, &["a", "b", "coords"]);
            let a = c.required(e, &ptr, "a").and_then(|x| c.basis_index_at(x, &format!("{ptr}/a")));
            let b = c.required(e, &ptr, "b").and_then(|x| c.basis_index_at(x, &format!("{ptr}/b")));
            let coords = c
                .required(e, &ptr, "coords")
                .and_then(|x| c.rationals_at(x, &format!("{ptr}/coords"), None));
            match (a, b, coords) {
                (Some(a), Some(b), Some(coords)) => out.push(ProductEntry { a, b, coords }),
                _ => ok = false,
            }
        }
        ok.then_some(out)
    });
    let unit = match o.get("unit") {
        Some(v) => c.rationals_at(v, "/model/unit", Some(1)),
        None => Some(vec![rational::one()]),
    };
    let top_dim = match (top_degree, dims.as_ref()) {
        (Some(t), Some(d)) => d.get(t).copied(),
        _ => None,
    };
    let integrate = c
        .required(o, p, "integrate")
        .and_then(|v| c.rationals_at(v, "/model/integrate", top_dim));
    let h = c
        .required(o, p, "h")
        .and_then(|v| c.rationals_at(v, "/model/h", dims.as_ref().and_then(|d| d.get(2).copied())));
    let ambient_dim = match o.get("ambient_dim") {
        Some(v) => Some(Some(c.usize_at(v, "/model/ambient_dim", 1)?)),
        None => Some(None),
    };
    let effective = match o.get("effective") {
        Some(v) => {
            let items = c.array(v, "/model/effective")?;
            let mut out = Vec::new();
            for (i, item) in items.iter().enumerate() {
                let ptr = format!("/model/effective/{i}");
                let Some(e) = c.object(item, &ptr) else { continue };
                c.known_keys(e, &ptr, &["degree", "coords"]);
                let degree = c.required(e, &ptr, "degree").and_then(|x| c.usize_at(x, &format!("{ptr}/degree"), 0));
                let len = degree.and_then(|d| dims.as_ref().and_then(|ds| ds.get(d).copied()));
                let coords = c
                    .required(e, &ptr, "coords")
                    .and_then(|x| c.rationals_at(x, &format!("{ptr}/coords"), len));
                if let (Some(d), Some(coords)) = (degree, coords) {
                    out.push((d, coords));
                }
            }
            Some(out)
        }
        None => Some(Vec::new()),
    };
    Some(CustomConfig {
        top_degree: top_degree?,
        dims: dims?,
        sign_rule: sign_rule?,
        products: products?,
        unit: unit?,
        integrate: integrate?,
        h: h?,
        ambient_dim: ambient_dim?,
        effective: effective?,
    })
}

fn check_map(c: &mut Checker, v: &Value, model: Option<&ModelConfig>) -> Option<MapConfig> {
    let o = c.object(v, "/map")?;
    let kind = c.required(o, "/map", "kind")?;
    let Some(kind) = kind.as_str() else {
        c.schema("/map/kind", "expected a string");
        return None;
    };
    let needs = |c: &mut Checker, expected: &str| -> bool {
        match model {
            Some(m) if m.kind() != expected => {
                c.schema("/map/kind", format!("map kind \"{kind}\" needs a {expected} model, got {}", m.kind()));
                false
            }
            _ => true,
        }
    };
    match kind {
        "power" => {
            c.known_keys(o, "/map", &["kind", "d"]);
            let d = c.required(o, "/map", "d").and_then(|d| c.usize_at(d, "/map/d", 0));
            let ok = needs(c, "projective");
            ok.then_some(MapConfig::Power { d: d? as u64 })
        }
        "product" => {
            c.known_keys(o, "/map", &["kind", "d", "perm"]);
            let d = c.required(o, "/map", "d").and_then(|d| c.usizes_at(d, "/map/d", 0));
            let perm = c.required(o, "/map", "perm").and_then(|p| c.usizes_at(p, "/map/perm", 0));
            let ok = needs(c, "multiprojective");
            let (d, perm) = (d?, perm?);
            if let Some(ModelConfig::Multiprojective { n }) = model {
                if d.len() != n.len() {
                    c.push("/map/d", ViolationKind::BadMatrixShape, format!("expected {} degrees", n.len()));
                }
                if perm.len() != n.len() {
                    c.push("/map/perm", ViolationKind::BadMatrixShape, format!("expected {} entries", n.len()));
                }
            }
            ok.then(|| MapConfig::Product {
                d: d.into_iter().map(|x| x as u64).collect(),
                perm,
            })
        }
        "identity" => {
            c.known_keys(o, "/map", &["kind"]);
            Some(MapConfig::Identity)
        }
        "h1" => {
            c.known_keys(o, "/map", &["kind", "matrix", "realizable"]);
            let ok = needs(c, "abelian");
            let shape = match model {
                Some(ModelConfig::Abelian { g, .. }) => Some((2 * g, 2 * g)),
                _ => None,
            };
            let matrix = c.required(o, "/map", "matrix").and_then(|m| c.matrix_at(m, "/map/matrix", shape));
            let realizable = match o.get("realizable") {
                Some(Value::Bool(b)) => Some(*b),
                Some(_) => {
                    c.schema("/map/realizable", "expected a boolean");
                    None
                }
                None => Some(false),
            };
            ok.then_some(MapConfig::H1 { matrix: matrix?, realizable: realizable? })
        }
        "isometry" => {
            c.known_keys(o, "/map", &["kind", "matrix"]);
            let ok = needs(c, "surface_lattice");
            let shape = match model {
                Some(ModelConfig::SurfaceLattice { gram, .. }) => Some((gram.rows(), gram.rows())),
                _ => None,
            };
            let matrix = c.required(o, "/map", "matrix").and_then(|m| c.matrix_at(m, "/map/matrix", shape));
            ok.then_some(MapConfig::Isometry { matrix: matrix? })
        }
        "matrices" => {
            c.known_keys(o, "/map", &["kind", "blocks"]);
            let items = c.required(o, "/map", "blocks").and_then(|b| c.array(b, "/map/blocks"))?;
            let dims = match model {
                Some(ModelConfig::Custom(cc)) => Some(cc.dims.clone()),
                _ => None,
            };
            if let Some(d) = &dims {
                if d.len() != items.len() {
                    c.push("/map/blocks", ViolationKind::BadMatrixShape, format!("expected {} blocks", d.len()));
                    return None;
                }
            }
            let mut blocks = Vec::new();
            let mut ok = true;
            for (i, item) in items.iter().enumerate() {
                let shape = dims.as_ref().map(|d| (d[i], d[i]));
                match c.matrix_at(item, &format!("/map/blocks/{i}"), shape) {
                    Some(m) if m.is_square() => blocks.push(m),
                    Some(_) => {
                        c.push(&format!("/map/blocks/{i}"), ViolationKind::BadMatrixShape, "block must be square");
                        ok = false;
                    }
                    None => ok = false,
                }
            }
            ok.then_some(MapConfig::Matrices { blocks })
        }
        other => {
            c.schema("/map/kind", format!("unknown map kind \"{other}\""));
            None
        }
    }
}

/// `{"num": "...", "den": "..."}`.
pub fn rational_json(q: &Rational) -> Value {
    json!({"num": q.numer().to_string(), "den": q.denom().to_string()})
}

fn rationals_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_json).collect())
}

fn matrix_json(m: &Matrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| rationals_json(r)).collect())
}

fn model_json(m: &ModelConfig) -> Value {
    match m {
        ModelConfig::Projective { n } => json!({"kind": "projective", "n": n}),
        ModelConfig::Multiprojective { n } => json!({"kind": "multiprojective", "n": n}),
        ModelConfig::Abelian { g, polarization } => {
            let mut v = json!({"kind": "abelian", "g": g});
            if let Some(p) = polarization {
                v["polarization"] = rationals_json(p);
            }
            v
        }
        ModelConfig::SurfaceLattice { gram, ample } => {
            json!({"kind": "surface_lattice", "gram": matrix_json(gram), "ample": rationals_json(ample)})
        }
        ModelConfig::Custom(cc) => {
            let mut v = json!({
                "kind": "custom",
                "top_degree": cc.top_degree,
                "dims": cc.dims,
                "sign_rule": match cc.sign_rule {
                    SignRule::Commutative => "commutative",
                    SignRule::SuperCommutative => "super_commutative",
                },
                "products": cc.products.iter().map(|p| json!({
                    "a": [p.a.degree, p.a.index],
                    "b": [p.b.degree, p.b.index],
                    "coords": rationals_json(&p.coords),
                })).collect::<Vec<_>>(),
                "unit": rationals_json(&cc.unit),
                "integrate": rationals_json(&cc.integrate),
                "h": rationals_json(&cc.h),
                "effective": cc.effective.iter().map(|(d, coords)| json!({
                    "degree": d,
                    "coords": rationals_json(coords),
                })).collect::<Vec<_>>(),
            });
            if let Some(a) = cc.ambient_dim {
                v["ambient_dim"] = json!(a);
            }
            v
        }
    }
}

fn map_json(m: &MapConfig) -> Value {
    match m {
        MapConfig::Power { d } => json!({"kind": "power", "d": d}),
        MapConfig::Product { d, perm } => json!({"kind": "product", "d": d, "perm": perm}),
        MapConfig::Identity => json!({"kind": "identity"}),
        MapConfig::H1 { matrix, realizable } => {
            json!({"kind": "h1", "matrix": matrix_json(matrix), "realizable": realizable})
        }
        MapConfig::Isometry { matrix } => json!({"kind": "isometry", "matrix": matrix_json(matrix)}),
        MapConfig::Matrices { blocks } => {
            json!({"kind": "matrices", "blocks": blocks.iter().map(matrix_json).collect::<Vec<_>>()})
        }
    }
}

/// Canonical JSON form of a config; `parse_config` reads it back unchanged.
pub fn config_to_value(cfg: &RunConfig) -> Value {
    let mut v = json!({
        "schema_version": SCHEMA_VERSION,
        "model": model_json(&cfg.model),
        "map": map_json(&cfg.map),
        "analyses": cfg.analyses.iter().map(|a| a.name()).collect::<Vec<_>>(),
        "M": cfg.max_power,
        "tol": cfg.tol,
    });
    if let Some(a) = &cfg.ample {
        v["ample"] = rationals_json(a);
    }
    if let Some(o) = &cfg.output {
        v["output"] = json!(o);
    }
    v
}

pub fn serialize_config(cfg: &RunConfig) -> String {
    serde_json::to_string_pretty(&config_to_value(cfg)).expect("config serializes")
}
