//! wasm-bindgen entry points for the static demo page in `www/`.
//!
//! Results come back as flat `Float64Array`s; the page knows the shapes.

use fca_core::sim::{evolve, linspace, sweep, InitialState, SweepAxis};
use fca_core::two_particle::TwoParticleParams;
use fca_core::walks::{dispersion, Chirality, WalkModel};
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn walk(model: &str, mass: f64) -> Result<WalkModel, JsError> {
    match model {
        "weyl+" => Ok(WalkModel::Weyl(Chirality::Right)),
        "weyl-" => Ok(WalkModel::Weyl(Chirality::Left)),
        "dirac" => Ok(WalkModel::Dirac { chirality: Chirality::Right, mass }),
        "massless1d" => Ok(WalkModel::Massless1d),
        other => Err(JsError::new(&format!("unknown walk `{other}`"))),
    }
}

/// Eigenphases along `k = t·(1, 1, 1)/√3`, `t ∈ [−π, π]`.
///
/// Each of the `points` rows is `t` followed by the branches, ascending.
#[wasm_bindgen]
pub fn dispersion_curve(model: &str, mass: f64, points: usize) -> Result<Vec<f64>, JsError> {
    let model = walk(model, mass)?;
    let axis = 1.0 / 3f64.sqrt();
    let mut out = Vec::new();
    for t in linspace(-std::f64::consts::PI, std::f64::consts::PI, points) {
        let k = match model {
            WalkModel::Massless1d => [t, 0.0, 0.0],
            _ => [t * axis, t * axis, t * axis],
        };
        out.push(t);
        out.extend(dispersion(&model, k).map_err(js_err)?);
    }
    Ok(out)
}

/// Number of branches per row of [`dispersion_curve`].
#[wasm_bindgen]
pub fn dispersion_branches(model: &str) -> Result<usize, JsError> {
    Ok(walk(model, 0.0)?.branches())
}

/// `P(t, y)` for `t = 0..=steps` (rows) and `y = −L..=L` (columns).
#[wasm_bindgen]
pub fn evolve_heatmap(
    p: f64,
    lambda_abs: f64,
    lambda_phase: f64,
    half_width: usize,
    steps: usize,
    initial: &str,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    let params = TwoParticleParams::new(p, lambda_abs, lambda_phase, half_width).map_err(js_err)?;
    let initial: InitialState = initial.parse().map_err(js_err)?;
    let trace = evolve(&params, &initial, steps, seed).map_err(js_err)?;
    Ok(trace.probabilities.concat())
}

/// Localization metric at `points` values of |λ| in `[lo, hi]`, as
/// interleaved `(λ, metric)` pairs.
#[wasm_bindgen]
pub fn bound_state_sweep(
    p: f64,
    lo: f64,
    hi: f64,
    points: usize,
    half_width: usize,
    steps: usize,
    initial: &str,
) -> Result<Vec<f64>, JsError> {
    let base = TwoParticleParams::new(p, 1.0, 0.0, half_width).map_err(js_err)?;
    let initial: InitialState = initial.parse().map_err(js_err)?;
    let points = sweep(&base, SweepAxis::Lambda, &linspace(lo, hi, points), &initial, steps, 0).map_err(js_err)?;
    Ok(points.iter().flat_map(|pt| [pt.value, pt.metric]).collect())
}
