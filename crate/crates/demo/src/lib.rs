//! Browser demo: every export takes plain numbers and returns a JSON string
//! that `www/index.html` draws on a canvas.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use uvnet::estimate::{point_estimate_lp, posterior_set, EstimateProblem};
use uvnet::filters::{build_localization_scenario, connected_components, naive_bayes_posterior, parse_scenario};
use uvnet::fixtures::{diamond, square_star, CORRIDOR_SCENARIO};
use uvnet::geometry::plot::region_polygons;
use uvnet::geometry::{AxisBox, Region, Support, Verdict};
use uvnet::uncertainty::{evaluate_map, ConditionalMap, VariableSignature};

fn polygons(r: &Region) -> Value {
    json!(region_polygons(r))
}

fn interval(r: &Region) -> Result<Value, String> {
    if r.is_empty() == Verdict::True {
        return Ok(Value::Null);
    }
    let hi = r.linear_max(&[1.0]).map_err(|e| e.to_string())?;
    let lo = r.linear_max(&[-1.0]).map_err(|e| e.to_string())?;
    match (lo, hi) {
        (Support::Value(lo), Support::Value(hi)) => Ok(json!([-lo, hi])),
        _ => Err("unbounded slice".into()),
    }
}

/// The diamond joint and its conditional at `x`.
pub fn diamond_slice(x: f64) -> Result<String, String> {
    let d = diamond();
    let m = ConditionalMap::single(
        VariableSignature::new("x", 1).map_err(|e| e.to_string())?,
        VariableSignature::new("y", 1).map_err(|e| e.to_string())?,
        d.clone(),
    )
    .map_err(|e| e.to_string())?;
    let slice = evaluate_map(&m, &[x]).map_err(|e| e.to_string())?;
    Ok(json!({ "joint": polygons(&d), "x": x, "slice": interval(&slice)? }).to_string())
}

fn square(c: &[f64], half: f64) -> Region {
    Region::from_box(
        AxisBox::new(vec![c[0] - half, c[1] - half], vec![c[0] + half, c[1] + half]).expect("ordered bounds"),
    )
}

/// Point estimate from planar observations `ys = [x2, y2, x3, y3, ...]`, each
/// within the square of side `side` around the unknown state.
pub fn square_estimate(ys: &[f64], side: f64) -> Result<String, String> {
    if ys.len() < 2 || !ys.len().is_multiple_of(2) {
        return Err("observations come in (x, y) pairs".into());
    }
    if !(side > 0.0) {
        return Err("the side length must be positive".into());
    }
    let obs: Vec<Vec<f64>> = ys.chunks(2).map(<[f64]>::to_vec).collect();
    let evidence: Vec<(usize, Vec<f64>)> = obs.iter().enumerate().map(|(k, y)| (k + 2, y.clone())).collect();
    let p = EstimateProblem::new(square_star(side, obs.len()), evidence, vec![1]).map_err(|e| e.to_string())?;
    let res = point_estimate_lp(&p).map_err(|e| e.to_string())?;
    if !res.is_optimal() {
        return Err(format!("estimate failed: {}", res.status));
    }
    let post = posterior_set(&p).map_err(|e| e.to_string())?;
    let squares: Vec<Value> = obs.iter().map(|y| polygons(&square(y, side / 2.0))).collect();
    let scaled: Vec<Value> = obs
        .iter()
        .enumerate()
        .map(|(k, y)| polygons(&square(y, res.beta[&(k + 2)] * side / 2.0)))
        .collect();
    let beta: Vec<f64> = (2..obs.len() + 2).map(|i| res.beta[&i]).collect();
    Ok(json!({
        "squares": squares,
        "posterior": polygons(&post),
        "estimate": res.x_hat[&1],
        "scaled": scaled,
        "beta": beta,
        "objective": res.objective,
        "unique": res.unique,
    })
    .to_string())
}

/// Corridor localization with noise-free readings taken at `(x, y)`, each
/// sensor's noise radius set to `sigma`.
pub fn corridor_posterior(x: f64, y: f64, sigma: f64) -> Result<String, String> {
    if !(sigma > 0.0) {
        return Err("the noise radius must be positive".into());
    }
    let mut s = parse_scenario(CORRIDOR_SCENARIO).map_err(|e| e.to_string())?;
    for sensor in &mut s.sensors {
        sensor.sigma = sigma;
    }
    let pose = [x, y];
    if !s.is_free(&pose) {
        return Err("that point is not in free space".into());
    }
    let m = build_localization_scenario(&s).map_err(|e| e.to_string())?;
    let ys: Vec<Vec<f64>> = s.ideal_readings(&pose).chunks(2).map(<[f64]>::to_vec).collect();
    let post = naive_bayes_posterior(&m, &ys).map_err(|e| e.to_string())?;
    let obstacles: Vec<Value> = s
        .obstacles
        .iter()
        .map(|o| polygons(&Region::from_box(o.clone())))
        .collect();
    let beacons: Vec<&Vec<f64>> = s.sensors.iter().map(|b| &b.beacon).collect();
    Ok(json!({
        "world": [s.world.lower(), s.world.upper()],
        "obstacles": obstacles,
        "beacons": beacons,
        "posterior": polygons(&post),
        "components": connected_components(&post).map_err(|e| e.to_string())?,
    })
    .to_string())
}

#[wasm_bindgen(js_name = diamondSlice)]
pub fn diamond_slice_js(x: f64) -> Result<String, JsValue> {
    diamond_slice(x).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = squareEstimate)]
pub fn square_estimate_js(ys: Vec<f64>, side: f64) -> Result<String, JsValue> {
    square_estimate(&ys, side).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = corridorPosterior)]
pub fn corridor_posterior_js(x: f64, y: f64, sigma: f64) -> Result<String, JsValue> {
    corridor_posterior(x, y, sigma).map_err(|e| JsValue::from_str(&e))
}
