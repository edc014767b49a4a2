//! JSON documents. Field elements are written as integers over prime fields
//! and as coefficient arrays (constant term first) otherwise.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::constructions::{verify_delta, DeltaSystem, FurstenbergInstance, Witness};
use crate::error::{Error, Result};
use crate::exact::Beta;
use crate::ff::{Field, FieldElem};
use crate::geometry::{canonical_direction, line_through, Direction, Line, Point};
use crate::lw::GridSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldJson {
    pub p: u32,
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElemJson {
    Int(u32),
    Poly(Vec<u32>),
}

pub type PointJson = Vec<ElemJson>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineJson {
    pub base: PointJson,
    pub dir: PointJson,
}

pub fn field_json(f: &Field) -> FieldJson {
    FieldJson {
        p: f.characteristic(),
        m: f.degree(),
        modulus: f.modulus().map(<[u32]>::to_vec),
    }
}

pub fn field_from_json(doc: &FieldJson) -> Result<Field> {
    match &doc.modulus {
        Some(modulus) if doc.m > 1 => {
            if modulus.len() != doc.m as usize + 1 {
                return Err(Error::Format(format!(
                    "modulus has {} coefficients, expected {}",
                    modulus.len(),
                    doc.m + 1
                )));
            }
            Field::with_modulus(doc.p, modulus.clone())
        }
        _ => Field::new(doc.p, doc.m),
    }
}

pub fn elem_json(f: &Field, e: FieldElem) -> ElemJson {
    if f.is_prime_field() {
        ElemJson::Int(e.index())
    } else {
        ElemJson::Poly(f.coeffs(e))
    }
}

pub fn elem_from_json(f: &Field, e: &ElemJson) -> Result<FieldElem> {
    match e {
        ElemJson::Int(v) if f.is_prime_field() => f.from_index(*v),
        ElemJson::Poly(c) if !f.is_prime_field() => f.from_coeffs(c),
        _ => Err(Error::Format(format!(
            "element {e:?} does not match a field of degree {}",
            f.degree()
        ))),
    }
}

pub fn point_json(f: &Field, coords: &[FieldElem]) -> PointJson {
    coords.iter().map(|&c| elem_json(f, c)).collect()
}

pub fn point_from_json(f: &Field, doc: &[ElemJson]) -> Result<Point> {
    Ok(Point(
        doc.iter()
            .map(|e| elem_from_json(f, e))
            .collect::<Result<_>>()?,
    ))
}

pub fn direction_from_json(f: &Field, doc: &[ElemJson]) -> Result<Direction> {
    canonical_direction(f, &point_from_json(f, doc)?.0)
}

pub fn line_json(f: &Field, l: &Line) -> LineJson {
    LineJson {
        base: point_json(f, l.base().coords()),
        dir: point_json(f, l.direction().vector()),
    }
}

/// Any base point and any nonzero direction vector are accepted; the line
/// is stored canonically.
pub fn line_from_json(f: &Field, doc: &LineJson) -> Result<Line> {
    let base = point_from_json(f, &doc.base)?;
    let dir = direction_from_json(f, &doc.dir)?;
    if base.dim() != dir.dim() {
        return Err(Error::Format(
            "line base and direction differ in dimension".into(),
        ));
    }
    Ok(line_through(f, &base, &dir))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct WitnessJson {
    dir: PointJson,
    line: LineJson,
    count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct InstanceJson {
    field: FieldJson,
    n: usize,
    beta: String,
    #[serde(rename = "K")]
    k: f64,
    threshold: u64,
    points: Vec<PointJson>,
    witnesses: Vec<WitnessJson>,
}

pub fn instance_to_value(inst: &FurstenbergInstance) -> Value {
    let f = &inst.field;
    let doc = InstanceJson {
        field: field_json(f),
        n: inst.n,
        beta: inst.beta.to_string(),
        k: inst.k,
        threshold: inst.threshold,
        points: inst
            .points
            .iter()
            .map(|p| point_json(f, p.coords()))
            .collect(),
        witnesses: inst
            .witnesses
            .iter()
            .map(|w| WitnessJson {
                dir: point_json(f, w.direction.vector()),
                line: line_json(f, &w.line),
                count: w.count,
            })
            .collect(),
    };
    serde_json::to_value(doc).expect("plain data serializes")
}

pub fn instance_to_string(inst: &FurstenbergInstance) -> String {
    to_pretty(&instance_to_value(inst))
}

/// Parses and validates an instance; stored witness counts must match.
pub fn instance_from_str(s: &str) -> Result<FurstenbergInstance> {
    let doc: InstanceJson = serde_json::from_str(s)?;
    let field = field_from_json(&doc.field)?;
    let beta: Beta = doc.beta.parse()?;
    let mut points = doc
        .points
        .iter()
        .map(|p| point_from_json(&field, p))
        .collect::<Result<Vec<_>>>()?;
    points.sort_unstable();
    points.dedup();
    let witnesses = doc
        .witnesses
        .iter()
        .map(|w| {
            Ok(Witness {
                direction: direction_from_json(&field, &w.dir)?,
                line: line_from_json(&field, &w.line)?,
                count: w.count,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let inst = FurstenbergInstance {
        field,
        n: doc.n,
        beta,
        k: doc.k,
        threshold: doc.threshold,
        points,
        witnesses,
    };
    inst.validate()?;
    Ok(inst)
}

pub fn grid_to_string(g: &GridSet) -> String {
    to_pretty(&serde_json::to_value(g).expect("plain data serializes"))
}

pub fn grid_from_str(s: &str) -> Result<GridSet> {
    // Validation errors surface through serde as messages.
    Ok(serde_json::from_str(s)?)
}

/// Grid of a point set, labelling each coordinate by its enumeration index.
pub fn grid_from_points(points: &[Point]) -> Result<GridSet> {
    let n = points.first().map_or(1, Point::dim);
    GridSet::new(
        n,
        points
            .iter()
            .map(|p| p.coords().iter().map(|c| c.index() as i64).collect()),
    )
}

/// The delta system, its recipe and its coverage report in one document.
pub fn delta_to_value(d: &DeltaSystem) -> Value {
    let f = d.field();
    json!({
        "field": field_json(f),
        "recipe": d.recipe(),
        "delta": point_json(f, d.delta()),
        "mu": elem_json(f, d.mu()),
        "multipliers": point_json(f, d.multipliers()),
        "report": verify_delta(d),
    })
}

/// Pretty JSON with a trailing newline. Object keys come out sorted,
/// so output is byte-for-byte reproducible.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}
