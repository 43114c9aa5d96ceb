//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a flat `Float64Array` of rows with a fixed stride,
//! which the page slices into plot series.

use tfse_core::specfun::{self, FractionalOrder, KernelOptions, Ray};
use tfse_core::tfse::{self, RunConfig};
use wasm_bindgen::prelude::*;

const TOL: f64 = 1e-9;
/// Rows are capped so a slider drag cannot stall the page.
const MAX_POINTS: usize = 4000;

fn check_count(count: usize) -> Result<(), String> {
    if !(2..=MAX_POINTS).contains(&count) {
        return Err(format!("point count must be between 2 and {MAX_POINTS}"));
    }
    Ok(())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Rows of `[t, re_total, im_total, re_osc, im_osc, re_decay, im_decay]`.
pub fn ml_rows(nu: f64, sigma: f64, plus: bool, t_max: f64, count: usize) -> Result<Vec<f64>, String> {
    check_count(count)?;
    if !(t_max > 0.0) {
        return Err("t_max must be positive".into());
    }
    let order = FractionalOrder::new(nu).map_err(|e| e.to_string())?;
    let ray = if plus { Ray::PlusI } else { Ray::MinusI };
    let opts = KernelOptions::with_tol(TOL);
    let mut out = Vec::with_capacity(7 * count);
    for t in linspace(0.0, t_max, count) {
        let d = specfun::ml_ray_decomposed(sigma, ray, order, t, &opts).map_err(|e| e.to_string())?;
        out.extend([t, d.total.re, d.total.im, d.oscillatory.re, d.oscillatory.im, d.decay.re, d.decay.im]);
    }
    Ok(out)
}

fn well(nu: f64, n: u32) -> Result<(RunConfig, tfse::WellMode), String> {
    let order = FractionalOrder::new(nu).map_err(|e| e.to_string())?;
    order.require_sub_unit().map_err(|e| e.to_string())?;
    // a = π, N_m = 1/2 puts the ground state at ω₁ = 1.
    let cfg = RunConfig::new(order, 0.5, 0.0).map_err(|e| e.to_string())?;
    let mode = tfse::well_mode(n, std::f64::consts::PI, &cfg).map_err(|e| e.to_string())?;
    Ok((cfg, mode))
}

/// Rows of `[t, |A(t)|²]` for well mode `n`, with the `1/ν²` limit appended
/// as a final pseudo-row `[NaN, limit]`.
pub fn well_probability_rows(nu: f64, n: u32, t_max: f64, count: usize) -> Result<Vec<f64>, String> {
    check_count(count)?;
    if !(t_max > 0.0) {
        return Err("t_max must be positive".into());
    }
    let (cfg, mode) = well(nu, n)?;
    let opts = KernelOptions::with_tol(TOL);
    let mut out = Vec::with_capacity(2 * count + 2);
    for t in linspace(0.0, t_max, count) {
        let a = tfse::well_amplitude(&mode, &cfg, t, &opts).map_err(|e| e.to_string())?;
        out.extend([t, a.norm_sqr()]);
    }
    out.extend([f64::NAN, 1.0 / (nu * nu)]);
    Ok(out)
}

/// Rows of `[t, Re E_n(t), Im E_n(t)]` on log-spaced `t ∈ [t_min, t_max]`,
/// with `[NaN, limit, 0]` appended.
pub fn energy_rows(nu: f64, n: u32, t_min: f64, t_max: f64, count: usize) -> Result<Vec<f64>, String> {
    check_count(count)?;
    if !(t_min > 0.0 && t_max > t_min) {
        return Err("need 0 < t_min < t_max".into());
    }
    let (cfg, mode) = well(nu, n)?;
    let opts = KernelOptions::with_tol(TOL);
    let mut out = Vec::with_capacity(3 * count + 3);
    for lt in linspace(t_min.ln(), t_max.ln(), count) {
        let t = lt.exp();
        let e = tfse::energy_level(&mode, &cfg, t, &opts).map_err(|e| e.to_string())?;
        out.extend([t, e.re, e.im]);
    }
    out.extend([f64::NAN, tfse::energy_limit(&mode, &cfg), 0.0]);
    Ok(out)
}

#[wasm_bindgen]
pub fn ml_curve(nu: f64, sigma: f64, plus: bool, t_max: f64, count: usize) -> Result<Vec<f64>, JsError> {
    ml_rows(nu, sigma, plus, t_max, count).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn well_probability(nu: f64, n: u32, t_max: f64, count: usize) -> Result<Vec<f64>, JsError> {
    well_probability_rows(nu, n, t_max, count).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn energy_curve(nu: f64, n: u32, t_min: f64, t_max: f64, count: usize) -> Result<Vec<f64>, JsError> {
    energy_rows(nu, n, t_min, t_max, count).map_err(|e| JsError::new(&e))
}
