//! WebAssembly entry points for the static page in `www/`.
//!
//! Every export returns a JSON string. The `*_json` functions hold the logic
//! and are plain Rust so they can be tested on the host.

use alphasqkd::channel_models::NoisePoint;
use alphasqkd::ir_analysis::ir_point;
use alphasqkd::keyrate_bound::GridSpec;
use alphasqkd::sweep::{evaluate_point, Range};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Keeps a single browser call responsive.
const MAX_CURVE_POINTS: usize = 401;

#[derive(Serialize)]
struct Curve {
    alpha: Vec<f64>,
    rate: Vec<f64>,
    sae_lower: Vec<f64>,
    hab: Vec<f64>,
    best_alpha: Option<f64>,
    best_rate: Option<f64>,
}

fn grid(points: u32) -> Result<GridSpec, String> {
    let g = GridSpec::with_points(points as usize);
    g.validate().map_err(|e| e.to_string())?;
    Ok(g)
}

fn alphas(min: f64, max: f64, step: f64) -> Result<Vec<f64>, String> {
    let r = Range { min, max, step };
    r.validate("alpha").map_err(|e| e.to_string())?;
    let v = r.values();
    if v.len() > MAX_CURVE_POINTS {
        return Err(format!("{} α values requested; the demo allows {MAX_CURVE_POINTS}", v.len()));
    }
    if min < 0.0 || max > 1.0 {
        return Err("α must lie in [0, 1]".into());
    }
    Ok(v)
}

pub fn keyrate_curve_json(
    q_f: f64,
    q_r: f64,
    q_x: f64,
    alpha_min: f64,
    alpha_max: f64,
    alpha_step: f64,
    grid_points: u32,
) -> Result<String, String> {
    let noise = NoisePoint::new(q_f, q_r, q_x).map_err(|e| e.to_string())?;
    let g = grid(grid_points)?;
    let mut c = Curve { alpha: vec![], rate: vec![], sae_lower: vec![], hab: vec![], best_alpha: None, best_rate: None };
    for a in alphas(alpha_min, alpha_max, alpha_step)? {
        let r = evaluate_point(a, noise, None, &g).map_err(|e| e.to_string())?;
        if c.best_rate.is_none_or(|b| r.rate > b) {
            c.best_rate = Some(r.rate);
            c.best_alpha = Some(a);
        }
        c.alpha.push(a);
        c.rate.push(r.rate);
        c.sae_lower.push(r.sae_lower);
        c.hab.push(r.hab);
    }
    serde_json::to_string(&c).map_err(|e| e.to_string())
}

pub fn keyrate_point_json(alpha: f64, q_f: f64, q_r: f64, q_x: f64, grid_points: u32) -> Result<String, String> {
    let noise = NoisePoint::new(q_f, q_r, q_x).map_err(|e| e.to_string())?;
    let report = evaluate_point(alpha, noise, None, &grid(grid_points)?).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

pub fn intercept_curve_json(alpha_step: f64) -> Result<String, String> {
    let points: Vec<_> = alphas(0.0, 1.0, alpha_step)?.into_iter().map(ir_point).collect();
    serde_json::to_string(&points).map_err(|e| e.to_string())
}

/// Key rate against α for one depolarizing noise point.
#[wasm_bindgen]
pub fn keyrate_curve(
    q_f: f64,
    q_r: f64,
    q_x: f64,
    alpha_min: f64,
    alpha_max: f64,
    alpha_step: f64,
    grid_points: u32,
) -> Result<String, JsValue> {
    keyrate_curve_json(q_f, q_r, q_x, alpha_min, alpha_max, alpha_step, grid_points).map_err(|e| JsValue::from_str(&e))
}

/// Full report, including the minimizing hidden parameters, at one point.
#[wasm_bindgen]
pub fn keyrate_point(alpha: f64, q_f: f64, q_r: f64, q_x: f64, grid_points: u32) -> Result<String, JsValue> {
    keyrate_point_json(alpha, q_f, q_r, q_x, grid_points).map_err(|e| JsValue::from_str(&e))
}

/// Intercept-resend key rate of the projective variant over `α ∈ [0, 1]`.
#[wasm_bindgen]
pub fn intercept_curve(alpha_step: f64) -> Result<String, JsValue> {
    intercept_curve_json(alpha_step).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn curve_has_matching_lengths_and_best_point() {
        let v: Value =
            serde_json::from_str(&keyrate_curve_json(1e-5, 0.05, 0.05, 0.0, 0.3, 0.05, 10).unwrap()).unwrap();
        let n = v["alpha"].as_array().unwrap().len();
        assert_eq!(n, 7);
        assert_eq!(v["rate"].as_array().unwrap().len(), n);
        assert!(v["best_rate"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn point_report_round_trips() {
        let v: Value = serde_json::from_str(&keyrate_point_json(0.2, 0.0, 0.0, 0.0, 10).unwrap()).unwrap();
        assert!(v["rate"].as_f64().unwrap() > 0.0);
        assert!(v["argmin"]["q3"].is_number());
    }

    #[test]
    fn intercept_curve_endpoints() {
        let v: Value = serde_json::from_str(&intercept_curve_json(0.1).unwrap()).unwrap();
        let pts = v.as_array().unwrap();
        assert_eq!(pts.len(), 11);
        assert!(pts[0]["rate"].as_f64().unwrap().abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(keyrate_curve_json(0.7, 0.0, 0.0, 0.0, 0.5, 0.1, 10).is_err());
        assert!(keyrate_curve_json(0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 10).is_err());
        assert!(keyrate_curve_json(0.0, 0.0, 0.0, 0.0, 1.0, 0.001, 10).is_err());
        assert!(keyrate_point_json(0.2, 0.0, 0.0, 0.0, 1).is_err());
        assert!(intercept_curve_json(-0.1).is_err());
    }
}
