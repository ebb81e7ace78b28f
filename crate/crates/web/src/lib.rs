//! Browser front end: the same TOML problems as the command line, driven
//! from a single page. Every export has a plain Rust twin so it can be
//! tested natively.

use varstab::cli::{parse_config, Problem};
use wasm_bindgen::prelude::*;

/// Preset problems shipped with the page, as `(name, toml)`.
pub const PRESETS: [(&str, &str); 6] = [
    ("wheel", include_str!("../../../configs/wheel.toml")),
    (
        "wheel_dissipative",
        include_str!("../../../configs/wheel_dissipative.toml"),
    ),
    ("cart_new", include_str!("../../../configs/cart_new.toml")),
    ("cart_blm", include_str!("../../../configs/cart_blm.toml")),
    (
        "cart_dissipative",
        include_str!("../../../configs/cart_dissipative.toml"),
    ),
    ("free", include_str!("../../../configs/free.toml")),
];

/// Rows returned by [`trajectory`] are thinned to at most this many.
const MAX_ROWS: usize = 4000;

/// Builds a problem from TOML text. Output paths are dropped: the page has
/// no file system.
fn load(config: &str) -> Result<Problem, String> {
    let mut spec = parse_config(config).map_err(|e| e.to_string())?;
    spec.run.csv = None;
    spec.run.svg = None;
    Problem::build(spec).map_err(|e| e.to_string())
}

/// Classification, variationality, stability and (with `state0`) a
/// simulation summary.
pub fn report_text(config: &str) -> Result<String, String> {
    load(config)?.report_text().map_err(|e| e.to_string())
}

/// Flattened rows `t, y, ydot, E` (E is NaN when no energy exists), from
/// `[run] state0` up to `t_end`.
pub fn trajectory(config: &str, t_end: f64) -> Result<Vec<f64>, String> {
    let mut problem = load(config)?;
    if t_end.is_nan() || t_end <= 0.0 {
        return Err("t_end must be positive".into());
    }
    problem.spec.run.t_end = Some(t_end);
    let (traj, _) = problem.simulate().map_err(|e| e.to_string())?;
    let stride = traj.len().div_ceil(MAX_ROWS).max(1);
    let mut idx: Vec<usize> = (0..traj.len()).step_by(stride).collect();
    if idx.last().is_some_and(|&k| k + 1 < traj.len()) {
        idx.push(traj.len() - 1);
    }
    let mut out = Vec::with_capacity(4 * idx.len());
    for k in idx {
        let e = traj.energy.as_ref().map_or(f64::NAN, |e| e[k]);
        out.extend([traj.times[k], traj.y(k), traj.ydot(k), e]);
    }
    Ok(out)
}

/// Flattened rows `y, M(y), N(y)` of the control on `n` cell centres of
/// the working interval.
pub fn control_profile(config: &str, n: usize) -> Result<Vec<f64>, String> {
    let problem = load(config)?;
    let control = problem
        .control
        .as_ref()
        .ok_or("the problem has no control")?;
    if n < 2 {
        return Err("need at least two samples".into());
    }
    let mut out = Vec::with_capacity(3 * n);
    for y in problem.system.interval().cell_centers(n) {
        let m = control.m.jet(y).map_err(|e| e.to_string())?.value;
        let v = control.n.jet(y).map_err(|e| e.to_string())?.value;
        out.extend([y, m, v]);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn preset_names() -> Vec<String> {
    PRESETS.iter().map(|(n, _)| n.to_string()).collect()
}

#[wasm_bindgen]
pub fn preset(name: &str) -> Option<String> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| t.to_string())
}

#[wasm_bindgen]
pub fn report(config: &str) -> Result<String, JsValue> {
    report_text(config).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn simulate(config: &str, t_end: f64) -> Result<Vec<f64>, JsValue> {
    trajectory(config, t_end).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn control_curve(config: &str, n: usize) -> Result<Vec<f64>, JsValue> {
    control_profile(config, n).map_err(|e| JsValue::from_str(&e))
}
