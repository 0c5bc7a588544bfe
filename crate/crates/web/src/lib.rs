//! Browser bindings for the demo page in `www/`.
//!
//! Every export takes a flat `Float64Array` signal plus a seed and returns a
//! flat `Float64Array`, so the page needs no glue beyond the generated module.

use wasm_bindgen::prelude::*;

use stiefelgen::augment::{self, AugmentConfig};
use stiefelgen::rng::seeded;
use stiefelgen::signal::TimeSeries;
use stiefelgen::sphere::{self, SphereGenConfig};

fn js(e: stiefelgen::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Quasi-periodic test signal with occasional spikes.
#[wasm_bindgen]
pub fn demo_signal(len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| {
            let t = i as f64;
            let spike = if i % 97 == 0 { 2.0 } else { 0.0 };
            3.0 * (t / 40.0).sin() + 0.8 * (t / 7.0).cos() + 0.3 * (t / 3.1).sin() + spike
        })
        .collect()
}

fn augment_inner(values: &[f64], rows: usize, beta_u: f64, beta_v: f64, smooth: usize, seed: u64) -> stiefelgen::Result<Vec<f64>> {
    let series = TimeSeries::new(values.to_vec())?;
    let cfg = AugmentConfig::new(beta_u).with_betas(beta_u, beta_v).with_smoothing(smooth);
    Ok(augment::stiefelgen_series(&series, rows, &cfg, &mut seeded(seed))?.into_values())
}

/// One augmentation through a `rows`-row page matrix.
#[wasm_bindgen]
pub fn augment_series(values: &[f64], rows: usize, beta_u: f64, beta_v: f64, smooth: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    augment_inner(values, rows, beta_u, beta_v, smooth, seed).map_err(js)
}

fn geodesic_inner(values: &[f64], rows: usize, beta: f64, smooth: usize, steps: usize, seed: u64) -> stiefelgen::Result<Vec<f64>> {
    let series = TimeSeries::new(values.to_vec())?;
    let cfg = AugmentConfig::new(beta).with_smoothing(smooth);
    let path = augment::geodesic_series(&series, rows, &cfg, steps, &mut seeded(seed))?;
    Ok(path.into_iter().flat_map(TimeSeries::into_values).collect())
}

/// `steps + 1` series along one geodesic, concatenated.
#[wasm_bindgen]
pub fn geodesic_series(values: &[f64], rows: usize, beta: f64, smooth: usize, steps: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    geodesic_inner(values, rows, beta, smooth, steps, seed).map_err(js)
}

fn sphere_inner(values: &[f64], t: f64, boundary: f64, smooth: usize, seed: u64) -> stiefelgen::Result<Vec<f64>> {
    let series = TimeSeries::new(values.to_vec())?;
    let cfg = SphereGenConfig {
        t,
        boundary,
        smooth_len: smooth,
    };
    Ok(sphere::sphere_gen(&series, &cfg, &mut seeded(seed))?.smoothed.into_values())
}

/// Great-circle perturbation of the normalized signal.
#[wasm_bindgen]
pub fn sphere_gen(values: &[f64], t: f64, boundary: f64, smooth: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    sphere_inner(values, t, boundary, smooth, seed).map_err(js)
}
