//! JSON interchange for carriers, capacities, Möbius measures, tail
//! dependence functionals and point functions.
//!
//! Subsets appear either as sorted label arrays or, as table keys, as their
//! comma-joined labels. Every parse error carries a JSON path such as
//! `$.params.theta.table`.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::carrier::{enumerate_subsets, Carrier, PointFunction, SubsetMask, Torus, MAX_POINTS};
use crate::error::Error;
use crate::setfun::{Capacity, MobiusMeasure};
use crate::tdf::{SpectralAtom, TailDependenceFunctional};
use crate::transforms::{
    compose_capacity, distortion_capacity, exchangeable_capacity, subset_size_capacity, torus_storm_capacity,
    BernsteinFunction, Distortion, ShapeAtom,
};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{path}: {message}")]
pub struct ModelError {
    pub path: String,
    pub message: String,
    /// The model exceeds the supported carrier size.
    pub size_cap: bool,
}

impl ModelError {
    fn at(path: &str, message: impl Into<String>) -> Self {
        ModelError { path: path.to_string(), message: message.into(), size_cap: false }
    }

    fn core(path: &str, e: Error) -> Self {
        ModelError { path: path.to_string(), size_cap: matches!(e, Error::CarrierTooLarge { .. }), message: e.to_string() }
    }
}

type Parsed<T> = std::result::Result<T, ModelError>;

fn join(path: &str, field: &str) -> String {
    format!("{path}.{field}")
}

fn parse<T: DeserializeOwned>(v: &Value, path: &str) -> Parsed<T> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let inner = e.path().to_string();
        let full = if inner == "." { path.to_string() } else { join(path, &inner) };
        ModelError::at(&full, e.into_inner().to_string())
    })
}

/// Parses JSON text, reporting syntax errors with line and column.
pub fn parse_json(text: &str) -> Parsed<Value> {
    serde_json::from_str(text).map_err(|e| ModelError::at("$", format!("malformed JSON: {e}")))
}

fn kind_of(v: &Value, path: &str) -> Parsed<String> {
    match v.get("kind") {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(ModelError::at(&join(path, "kind"), "expected a string")),
        None => Err(ModelError::at(path, "missing field `kind`")),
    }
}

fn carrier_from(labels: Vec<String>, path: &str) -> Parsed<Carrier> {
    if labels.len() > MAX_POINTS {
        return Err(ModelError::core(path, Error::CarrierTooLarge { d: labels.len(), max: MAX_POINTS }));
    }
    Carrier::new(labels).map_err(|e| ModelError::core(path, e))
}

/// `{label: value}` with every label present and no others.
fn point_values(carrier: &Carrier, map: &BTreeMap<String, f64>, path: &str) -> Parsed<Vec<f64>> {
    let mut out = vec![f64::NAN; carrier.len()];
    for (label, v) in map {
        let i = carrier.index_of(label).map_err(|e| ModelError::core(&join(path, label), e))?;
        out[i] = *v;
    }
    if let Some(i) = out.iter().position(|v| v.is_nan()) {
        return Err(ModelError::at(path, format!("missing value for point {:?}", carrier.label(i))));
    }
    Ok(out)
}

/// `{subset-key: value}` covering every nonempty subset; the empty key may be
/// omitted.
fn subset_table(carrier: &Carrier, map: &BTreeMap<String, f64>, path: &str) -> Parsed<Vec<f64>> {
    let mut out = vec![f64::NAN; carrier.subset_count()];
    out[0] = 0.0;
    for (key, v) in map {
        let k = carrier.mask_from_key(key).map_err(|e| ModelError::core(&join(path, key), e))?;
        out[k.0 as usize] = *v;
    }
    if let Some(k) = enumerate_subsets(carrier, true).find(|k| out[k.0 as usize].is_nan()) {
        return Err(ModelError::at(path, format!("missing value for subset {:?}", carrier.subset_key(k))));
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    #[allow(dead_code)]
    kind: String,
    carrier: Vec<String>,
    table: BTreeMap<String, f64>,
    #[serde(default)]
    torus: Option<Torus>,
    /// Provenance written by the command-line tool; ignored on input.
    #[serde(default)]
    #[allow(dead_code)]
    provenance: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WithParams {
    #[allow(dead_code)]
    kind: String,
    #[serde(default)]
    carrier: Option<Vec<String>>,
    params: Value,
    /// Provenance written by the command-line tool; ignored on input.
    #[serde(default)]
    #[allow(dead_code)]
    provenance: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ZetaAtom {
    value: f64,
    p: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExchangeableParams {
    zeta: Vec<ZetaAtom>,
    c: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SubsetSizeParams {
    p: Vec<f64>,
    c: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DistortionParams {
    mu: BTreeMap<String, f64>,
    g: Distortion,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ShapeDoc {
    p: f64,
    cells: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StormParams {
    n: usize,
    dim: usize,
    /// Capacity per lattice point.
    #[serde(default = "unit_weight")]
    unit: f64,
    shape: Vec<ShapeDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ComposeParams {
    g: BernsteinFunction,
    theta: Value,
}

fn unit_weight() -> f64 {
    1.0
}

fn need_carrier(doc: &WithParams, path: &str) -> Parsed<Carrier> {
    match &doc.carrier {
        Some(labels) => carrier_from(labels.clone(), &join(path, "carrier")),
        None => Err(ModelError::at(path, "missing field `carrier`")),
    }
}

fn capacity_at(v: &Value, path: &str) -> Parsed<Capacity> {
    let kind = kind_of(v, path)?;
    if kind == "table" {
        let doc: TableDoc = parse(v, path)?;
        let carrier = carrier_from(doc.carrier, &join(path, "carrier"))?;
        let carrier = match doc.torus {
            Some(t) => carrier.with_torus(t).map_err(|e| ModelError::core(&join(path, "torus"), e))?,
            None => carrier,
        };
        let tpath = join(path, "table");
        let table = subset_table(&carrier, &doc.table, &tpath)?;
        return Capacity::new(carrier, table).map_err(|e| ModelError::core(&tpath, e));
    }
    let doc: WithParams = match kind.as_str() {
        "exchangeable" | "subset_size" | "distortion" | "torus_storm" | "bernstein_compose" => parse(v, path)?,
        other => {
            return Err(ModelError::at(
                &join(path, "kind"),
                format!("unknown capacity kind {other:?}; expected table, exchangeable, subset_size, distortion, torus_storm or bernstein_compose"),
            ))
        }
    };
    let ppath = join(path, "params");
    let built = match kind.as_str() {
        "exchangeable" => {
            let carrier = need_carrier(&doc, path)?;
            let p: ExchangeableParams = parse(&doc.params, &ppath)?;
            let zeta: Vec<(f64, f64)> = p.zeta.iter().map(|a| (a.value, a.p)).collect();
            exchangeable_capacity(carrier, &zeta, p.c)
        }
        "subset_size" => {
            let carrier = need_carrier(&doc, path)?;
            let p: SubsetSizeParams = parse(&doc.params, &ppath)?;
            subset_size_capacity(carrier, &p.p, p.c)
        }
        "distortion" => {
            let carrier = need_carrier(&doc, path)?;
            let p: DistortionParams = parse(&doc.params, &ppath)?;
            let mu = point_values(&carrier, &p.mu, &join(&ppath, "mu"))?;
            distortion_capacity(carrier, &mu, p.g)
        }
        "torus_storm" => {
            if doc.carrier.is_some() {
                return Err(ModelError::at(&join(path, "carrier"), "torus_storm derives its carrier from n and dim"));
            }
            let p: StormParams = parse(&doc.params, &ppath)?;
            let shape: Vec<ShapeAtom> = p.shape.into_iter().map(|s| ShapeAtom { p: s.p, cells: s.cells }).collect();
            torus_storm_capacity(p.n, p.dim, &shape, p.unit)
        }
        _ => {
            if doc.carrier.is_some() {
                return Err(ModelError::at(&join(path, "carrier"), "bernstein_compose takes its carrier from theta"));
            }
            let p: ComposeParams = parse(&doc.params, &ppath)?;
            let g = match p.g {
                BernsteinFunction::Levy { drift, atoms } => BernsteinFunction::levy(drift, atoms),
                BernsteinFunction::Power(a) => BernsteinFunction::power(a),
            }
            .map_err(|e| ModelError::core(&join(&ppath, "g"), e))?;
            let theta = capacity_at(&p.theta, &join(&ppath, "theta"))?;
            Ok(compose_capacity(&g, &theta))
        }
    };
    built.map_err(|e| ModelError::core(&ppath, e))
}

/// Parses a capacity document of any supported kind.
pub fn capacity_from_value(v: &Value) -> Parsed<Capacity> {
    capacity_at(v, "$")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MobiusDoc {
    carrier: Vec<String>,
    weights: BTreeMap<String, f64>,
    /// Provenance written by the command-line tool; ignored on input.
    #[serde(default)]
    #[allow(dead_code)]
    provenance: Option<Value>,
}

pub fn mobius_from_value(v: &Value) -> Parsed<MobiusMeasure> {
    let doc: MobiusDoc = parse(v, "$")?;
    let carrier = carrier_from(doc.carrier, "$.carrier")?;
    let weights = subset_table(&carrier, &doc.weights, "$.weights")?;
    MobiusMeasure::new(carrier, weights).map_err(|e| ModelError::core("$.weights", e))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChoquetDoc {
    #[allow(dead_code)]
    kind: String,
    theta: Value,
    /// Provenance written by the command-line tool; ignored on input.
    #[serde(default)]
    #[allow(dead_code)]
    provenance: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomDoc {
    p: f64,
    y: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectralDoc {
    #[allow(dead_code)]
    kind: String,
    carrier: Vec<String>,
    atoms: Vec<AtomDoc>,
    /// Provenance written by the command-line tool; ignored on input.
    #[serde(default)]
    #[allow(dead_code)]
    provenance: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LebesgueDoc {
    #[allow(dead_code)]
    kind: String,
    carrier: Vec<String>,
    mu: BTreeMap<String, f64>,
    /// Provenance written by the command-line tool; ignored on input.
    #[serde(default)]
    #[allow(dead_code)]
    provenance: Option<Value>,
}

fn tdf_at(v: &Value, path: &str) -> Parsed<TailDependenceFunctional> {
    match kind_of(v, path)?.as_str() {
        "choquet" => {
            let doc: ChoquetDoc = parse(v, path)?;
            Ok(TailDependenceFunctional::Choquet(capacity_at(&doc.theta, &join(path, "theta"))?))
        }
        "spectral" => {
            let doc: SpectralDoc = parse(v, path)?;
            let carrier = carrier_from(doc.carrier, &join(path, "carrier"))?;
            let mut atoms = Vec::with_capacity(doc.atoms.len());
            for (i, a) in doc.atoms.iter().enumerate() {
                let apath = format!("{path}.atoms[{i}]");
                let y = point_values(&carrier, &a.y, &join(&apath, "y"))?;
                let y = PointFunction::new(y).map_err(|e| ModelError::core(&join(&apath, "y"), e))?;
                atoms.push(SpectralAtom { p: a.p, y });
            }
            TailDependenceFunctional::spectral(carrier, atoms).map_err(|e| ModelError::core(&join(path, "atoms"), e))
        }
        "lebesgue" => {
            let doc: LebesgueDoc = parse(v, path)?;
            let carrier = carrier_from(doc.carrier, &join(path, "carrier"))?;
            let mpath = join(path, "mu");
            let mu = point_values(&carrier, &doc.mu, &mpath)?;
            TailDependenceFunctional::lebesgue(carrier, mu).map_err(|e| ModelError::core(&mpath, e))
        }
        other => Err(ModelError::at(
            &join(path, "kind"),
            format!("unknown functional kind {other:?}; expected choquet, spectral or lebesgue"),
        )),
    }
}

pub fn tdf_from_value(v: &Value) -> Parsed<TailDependenceFunctional> {
    tdf_at(v, "$")
}

/// A model file: either a capacity or a tail dependence functional.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Capacity(Capacity),
    Functional(TailDependenceFunctional),
}

impl Model {
    pub fn carrier(&self) -> &Carrier {
        match self {
            Model::Capacity(t) => t.carrier(),
            Model::Functional(l) => l.carrier(),
        }
    }

    /// The functional; a capacity stands for its Choquet functional.
    pub fn functional(&self) -> TailDependenceFunctional {
        match self {
            Model::Capacity(t) => TailDependenceFunctional::Choquet(t.clone()),
            Model::Functional(l) => l.clone(),
        }
    }

    /// Extremal coefficients `θ(K) = ℓ(1_K)`.
    pub fn capacity(&self) -> Capacity {
        match self {
            Model::Capacity(t) => t.clone(),
            Model::Functional(l) => l.extremal_coefficients(),
        }
    }
}

pub fn model_from_value(v: &Value) -> Parsed<Model> {
    match kind_of(v, "$")?.as_str() {
        "choquet" | "spectral" | "lebesgue" => tdf_from_value(v).map(Model::Functional),
        _ => capacity_from_value(v).map(Model::Capacity),
    }
}

pub fn model_from_str(text: &str) -> Parsed<Model> {
    model_from_value(&parse_json(text)?)
}

/// A point function given as `{"f": {label: value}}` or as the bare map.
pub fn function_from_value(carrier: &Carrier, v: &Value) -> Parsed<PointFunction> {
    let (inner, path) = match v.get("f") {
        Some(inner) => (inner, "$.f"),
        None => (v, "$"),
    };
    let map: BTreeMap<String, f64> = parse(inner, path)?;
    let values = point_values(carrier, &map, path)?;
    PointFunction::new(values).map_err(|e| ModelError::core(path, e))
}

/// A subset given as an array of labels.
pub fn subset_from_value(carrier: &Carrier, v: &Value, path: &str) -> Parsed<SubsetMask> {
    let labels: Vec<String> = parse(v, path)?;
    carrier.mask_from_labels(&labels).map_err(|e| ModelError::core(path, e))
}

pub fn subset_to_value(carrier: &Carrier, k: SubsetMask) -> Value {
    json!(carrier.mask_labels(k))
}

fn keyed(carrier: &Carrier, values: &[f64]) -> Map<String, Value> {
    enumerate_subsets(carrier, true).map(|k| (carrier.subset_key(k), json!(values[k.0 as usize]))).collect()
}

/// `{label: value}`.
pub fn points_to_value(carrier: &Carrier, values: &[f64]) -> Value {
    Value::Object(carrier.labels().iter().cloned().zip(values.iter().map(|v| json!(v))).collect())
}

pub fn capacity_to_value(theta: &Capacity) -> Value {
    let c = theta.carrier();
    let mut doc = json!({
        "kind": "table",
        "carrier": c.labels(),
        "table": keyed(c, theta.table()),
    });
    if let Some(t) = c.torus_structure() {
        doc["torus"] = json!(t);
    }
    doc
}

pub fn mobius_to_value(nu: &MobiusMeasure) -> Value {
    let c = nu.carrier();
    json!({ "carrier": c.labels(), "weights": keyed(c, nu.weights()) })
}

pub fn tdf_to_value(ell: &TailDependenceFunctional) -> Value {
    match ell {
        TailDependenceFunctional::Choquet(t) => json!({ "kind": "choquet", "theta": capacity_to_value(t) }),
        TailDependenceFunctional::Spectral { carrier, atoms } => json!({
            "kind": "spectral",
            "carrier": carrier.labels(),
            "atoms": atoms
                .iter()
                .map(|a| json!({ "p": a.p, "y": points_to_value(carrier, a.y.values()) }))
                .collect::<Vec<_>>(),
        }),
        TailDependenceFunctional::Lebesgue { carrier, mu } => json!({
            "kind": "lebesgue",
            "carrier": carrier.labels(),
            "mu": points_to_value(carrier, mu.weights()),
        }),
    }
}
