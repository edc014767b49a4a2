//! Browser bindings. Every export takes plain numbers or JSON text and
//! returns JSON text; the `*_json` functions are the same operations for
//! native callers and tests.

use furstenberg::constructions::{build_delta, build_prime_furstenberg};
use furstenberg::exact::Beta;
use furstenberg::io;
use furstenberg::lw::{default_constant, lw_bound, refine};
use furstenberg::Field;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest prime offered by the plane view; larger planes do not fit a
/// canvas at one cell per point anyway.
const MAX_PLANE: u32 = 211;

fn err(e: impl ToString) -> String {
    e.to_string()
}

/// A Furstenberg set in `F_p²`: its points, and one witness line per
/// direction listed point by point.
pub fn plane_json(p: u32, beta: &str, k: f64) -> Result<String, String> {
    if p > MAX_PLANE {
        return Err(format!(
            "p = {p} is larger than the demo allows ({MAX_PLANE})"
        ));
    }
    let beta: Beta = beta.parse().map_err(err)?;
    let c = build_prime_furstenberg(p, 2, beta, k).map_err(err)?;
    let inst = &c.instance;
    let f = &inst.field;
    let idx =
        |pt: &furstenberg::Point| -> Vec<u32> { pt.coords().iter().map(|c| c.index()).collect() };
    let witnesses: Vec<Value> = inst
        .witnesses
        .iter()
        .map(|w| {
            json!({
                "dir": w.direction.vector().iter().map(|c| c.index()).collect::<Vec<_>>(),
                "count": w.count,
                "points": w.line.points(f).iter().map(idx).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(json!({
        "p": p,
        "beta": beta.to_string(),
        "threshold": inst.threshold,
        "size": inst.len(),
        "min_count": inst.min_witness_count(),
        "delta": c.delta.delta().iter().map(|d| d.index()).collect::<Vec<_>>(),
        "mu": c.delta.mu().index(),
        "multipliers": c.multipliers.xs.iter().map(|x| x.index()).collect::<Vec<_>>(),
        "points": inst.points.iter().map(idx).collect::<Vec<_>>(),
        "witnesses": witnesses,
    })
    .to_string())
}

/// The delta system of `F_q` with its coverage report.
pub fn delta_json(q: u32, k: f64) -> Result<String, String> {
    let f = Field::of_order(q as u64).map_err(err)?;
    let d = build_delta(&f, k).map_err(err)?;
    Ok(io::delta_to_value(&d).to_string())
}

/// Refines a grid given as `{"n": .., "elements": [..]}`; `constant = 0`
/// selects the default `100 n`.
pub fn refine_json(grid: &str, m: usize, constant: u32) -> Result<String, String> {
    let g = io::grid_from_str(grid).map_err(err)?;
    let c = if constant == 0 {
        default_constant(g.n())
    } else {
        constant as u64
    };
    let r = refine(&g, m, c).map_err(err)?;
    let bound = if g.n() >= 2 {
        Some(lw_bound(&g).map_err(err)?)
    } else {
        None
    };
    Ok(json!({
        "certificate": r.certificate,
        "passes": r.certificate.passes(),
        "lw_bound": bound,
        "t2": r.t2,
    })
    .to_string())
}

#[wasm_bindgen(js_name = furstenbergPlane)]
pub fn furstenberg_plane(p: u32, beta: &str, k: f64) -> Result<String, JsError> {
    plane_json(p, beta, k).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = deltaCoverage)]
pub fn delta_coverage(q: u32, k: f64) -> Result<String, JsError> {
    delta_json(q, k).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = gridRefine)]
pub fn grid_refine(grid: &str, m: usize, constant: u32) -> Result<String, JsError> {
    refine_json(grid, m, constant).map_err(|e| JsError::new(&e))
}
