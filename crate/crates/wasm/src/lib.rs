//! Browser bindings: a directional spectrum heatmap, a uniformity curve for a
//! weight family, and counting plus configuration search on a random set.
//!
//! Every export returns a JSON string; failures come back as `{"error": ...}`
//! so the page never has to catch.

use ffprog_core::experiments::{find_configuration, reference_system};
use ffprog_core::fourier::{box_norm_v, directional_spectrum, inverse_bound, DEFAULT_ENUMERATION_CAP};
use ffprog_core::grid::rng_from_seed;
use ffprog_core::operators::{counting_lambda, main_term, CountingMode};
use ffprog_core::report::to_json_string;
use ffprog_core::weights::{uniformity_profile, WeightSpec};
use ffprog_core::{GridFunction, PrimeContext, RationalFunction, WeightFunction};
use num_complex::Complex64;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest prime the page may request; keeps each call interactive.
pub const MAX_P: u64 = 61;

fn checked_prime(p: u32) -> Result<PrimeContext, String> {
    if u64::from(p) > MAX_P {
        return Err(format!("p = {p} exceeds the demo limit {MAX_P}"));
    }
    PrimeContext::new(u64::from(p)).map_err(|e| e.to_string())
}

fn render(result: Result<Value, String>) -> String {
    to_json_string(&result.unwrap_or_else(|e| json!({ "error": e })))
}

/// A grid on `F_p^2`: `character` is `e_p(x_0 + 2 x_1)`, `bernoulli` a
/// half-density set, anything else unit-modulus random phases.
fn demo_grid(kind: &str, p: u64, seed: u32) -> Result<GridFunction, String> {
    let mut rng = rng_from_seed(u64::from(seed));
    let grid = match kind {
        "character" => {
            let ctx = PrimeContext::new(p).map_err(|e| e.to_string())?;
            GridFunction::from_fn(p, 2, |x| ctx.e((x[0] + 2 * x[1]) % p))
        }
        "bernoulli" => GridFunction::bernoulli(p, 2, 0.5, &mut rng),
        _ => GridFunction::random_phase(p, 2, &mut rng),
    };
    grid.map_err(|e| e.to_string())
}

pub fn spectrum_report(p: u32, v0: i32, v1: i32, kind: &str, seed: u32) -> Result<Value, String> {
    let ctx = checked_prime(p)?;
    let f = demo_grid(kind, ctx.p(), seed)?;
    let v = [i64::from(v0), i64::from(v1)];
    let spec = directional_spectrum(&f, &v, &ctx).map_err(|e| e.to_string())?;
    let magnitudes: Vec<Vec<f64>> = (0..spec.num_cosets())
        .map(|c| spec.row(c).iter().map(|z| z.norm()).collect())
        .collect();
    Ok(json!({
        "p": ctx.p(),
        "direction": v,
        "magnitudes": magnitudes,
        "energy_by_frequency": spec.energy_by_frequency(),
        "box_norm": box_norm_v(&f, &v, &ctx).map_err(|e| e.to_string())?,
        "inverse_bound": inverse_bound(&f, &v, &ctx).map_err(|e| e.to_string())?,
    }))
}

pub fn uniformity_report(weight: &str, s: u32, lo: u32, hi: u32) -> Result<Value, String> {
    if u64::from(hi) > 199 || s > 3 {
        return Err("demo limits: primes up to 199, s up to 3".into());
    }
    let spec: WeightSpec = serde_json::from_str(weight).map_err(|e| format!("weight: {e}"))?;
    let primes = ffprog_core::field::primes_between(u64::from(lo), u64::from(hi));
    let profile = uniformity_profile(&spec, s, &primes, DEFAULT_ENUMERATION_CAP).map_err(|e| e.to_string())?;
    Ok(json!({
        "s": s,
        "rows": profile.rows.iter().map(|r| json!({"p": r.p, "value": r.value})).collect::<Vec<_>>(),
        "slope": profile.fitted_slope(),
    }))
}

pub fn progression_report(p: u32, density: f64, seed: u32) -> Result<Value, String> {
    let ctx = checked_prime(p)?;
    let p = ctx.p();
    let a = GridFunction::bernoulli(p, 2, density, &mut rng_from_seed(u64::from(seed))).map_err(|e| e.to_string())?;
    let sys = reference_system(2).with_phi(Some(RationalFunction::reciprocal()));
    let theta = WeightFunction::constant(p, Complex64::new(1.0, 0.0)).map_err(|e| e.to_string())?;
    let fs = vec![a.clone(), a.clone(), a.clone()];
    let lambda = counting_lambda(&theta, &fs, &sys, &ctx, CountingMode::ExcludePoles).map_err(|e| e.to_string())?;
    let main = main_term(&theta, &fs, &sys, &ctx, CountingMode::ExcludePoles).map_err(|e| e.to_string())?;
    let found = find_configuration(&a, &sys, &ctx).map_err(|e| e.to_string())?;
    let members: Vec<usize> = (0..a.len()).filter(|&i| a.at(i).norm() > 0.5).collect();
    Ok(json!({
        "p": p,
        "members": members,
        "lambda": lambda.re,
        "main_term": main.re,
        "found": found.map(|c| json!({
            "parameter": c.parameter,
            "points": c.points,
            "all_distinct": c.all_distinct,
        })),
    }))
}

/// Directional spectrum magnitudes `|f^(rep_c; v; xi)|` of a demo grid, one row per coset.
#[wasm_bindgen]
pub fn spectrum_heatmap(p: u32, v0: i32, v1: i32, kind: &str, seed: u32) -> String {
    render(spectrum_report(p, v0, v1, kind, seed))
}

/// `||theta - E theta||_{u^s}` across the primes in `lo..=hi` with its log-log slope.
#[wasm_bindgen]
pub fn uniformity_curve(weight_json: &str, s: u32, lo: u32, hi: u32) -> String {
    render(uniformity_report(weight_json, s, lo, hi))
}

/// Counts `x, x + (1/y, 0), x + (0, 1/y^2)` in a random set and finds the first one.
#[wasm_bindgen]
pub fn rational_progressions(p: u32, density: f64, seed: u32) -> String {
    render(progression_report(p, density, seed))
}
