//! WebAssembly bindings behind the static demo page in `www/`.
//!
//! Each exported function takes plain text or numbers and returns a JSON
//! string; the `*_json` functions hold the logic and are testable natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use geofs::selector::predict_z;
use geofs::{
    affine_dimension, ambient_dimension, default_coefficients, parse_dataset, select, F6Mode, RankTolerance,
    SelectOptions,
};

/// Points are one per line, coordinates separated by spaces or commas.
fn parse_points(text: &str) -> Result<Vec<Vec<f64>>, String> {
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let p = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| format!("line {}: `{t}` is not a number", i + 1))
            })
            .collect::<Result<Vec<f64>, String>>()?;
        points.push(p);
    }
    if points.is_empty() {
        return Err("enter at least one point".into());
    }
    Ok(points)
}

pub fn hull_json(points: &str) -> Result<Value, String> {
    let pts = parse_points(points)?;
    let tol = RankTolerance::default();
    let affine = affine_dimension(&pts, tol).map_err(|e| e.to_string())?;
    let ambient = ambient_dimension(&pts).map_err(|e| e.to_string())?;
    Ok(json!({
        "points": pts.len(),
        "columns": pts[0].len(),
        "affine": affine,
        "ambient": ambient,
    }))
}

pub fn selection_json(vectors: &str, boundaries: &str, f6_mode: &str) -> Result<Value, String> {
    let ds = parse_dataset(vectors.as_bytes(), boundaries.as_bytes()).map_err(|e| e.to_string())?;
    let f6_mode: F6Mode = f6_mode.parse().map_err(|e: geofs::Error| e.to_string())?;
    let opts = SelectOptions {
        f6_mode,
        ..SelectOptions::default()
    };
    let report = select(&ds, &default_coefficients(), opts).map_err(|e| e.to_string())?;
    let partitions: Vec<Value> = report
        .partitions
        .iter()
        .map(|p| {
            let rows: Vec<Value> = p
                .results
                .iter()
                .map(|r| {
                    json!({
                        "subset": r.subset.to_string(),
                        "f": r.profile.raw,
                        "z": r.profile.z.unwrap_or_default(),
                        "lin": r.verdict.lin_pred,
                        "log": r.verdict.log_pred,
                        "optimal": r.verdict.optimal,
                    })
                })
                .collect();
            json!({ "partition": p.partition.canonical_name(), "subsets": rows })
        })
        .collect();
    Ok(json!({
        "rows": ds.n_rows(),
        "columns": ds.n_columns(),
        "partitions": partitions,
    }))
}

pub fn verdict_json(z: &[f64]) -> Result<Value, String> {
    let z: [f64; 6] = z
        .try_into()
        .map_err(|_| format!("expected 6 z-scores, got {}", z.len()))?;
    let v = predict_z(&z, &default_coefficients());
    Ok(json!({ "lin": v.lin_pred, "log": v.log_pred, "optimal": v.optimal }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

/// Affine and ambient dimension of the pasted points.
#[wasm_bindgen]
pub fn hull_dimensions(points: &str) -> Result<String, JsError> {
    to_js(hull_json(points))
}

/// Full selection pass over a pasted vectors file and boundaries file.
#[wasm_bindgen]
pub fn run_selection(vectors: &str, boundaries: &str, f6_mode: &str) -> Result<String, JsError> {
    to_js(selection_json(vectors, boundaries, f6_mode))
}

/// Both model predictions and the verdict for six z-scores.
#[wasm_bindgen]
pub fn score(z: &[f64]) -> Result<String, JsError> {
    to_js(verdict_json(z))
}
