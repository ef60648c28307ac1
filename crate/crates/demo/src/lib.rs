//! Browser front end: three operations on random order-4 TT tensors.
//!
//! Each export takes plain numbers and strings and returns JSON or SVG text,
//! so the page needs no bundler. The same functions are callable natively.

use serde::Serialize;
use tt_inherit::experiment::svg::render_boxplots;
use tt_inherit::experiment::{run_trial, summarize, ExperimentConfig, Scale};
use tt_inherit::generators::{generate, GeneratorKind, GeneratorSpec};
use tt_inherit::properties::TtAnalysis;
use wasm_bindgen::prelude::*;

/// Largest mode size the page accepts.
pub const MAX_MODE: usize = 40;
pub const MAX_TRIALS: usize = 50;

const RANKS: [usize; 3] = [2, 3, 2];

#[derive(Debug, Serialize)]
pub struct UnfoldingRow {
    pub i: usize,
    pub rank: usize,
    pub mu1: f64,
    pub mu2: f64,
    pub kappa: f64,
    pub sigma: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct ParamRow {
    pub label: String,
    pub value: f64,
    pub bound_pass: bool,
}

fn config(n: usize, kind: GeneratorKind, seed: u64, trials: usize) -> Result<ExperimentConfig, String> {
    if !(4..=MAX_MODE).contains(&n) {
        return Err(format!("mode size must lie in [4, {MAX_MODE}]"));
    }
    if !(1..=MAX_TRIALS).contains(&trials) {
        return Err(format!("trials must lie in [1, {MAX_TRIALS}]"));
    }
    let mut c = ExperimentConfig::preset(Scale::Desk);
    c.shape = vec![n; 4];
    c.generators = vec![kind];
    c.master_seed = seed;
    c.trials = trials;
    c.validate().map_err(|e| e.to_string())?;
    Ok(c)
}

fn kind(name: &str) -> Result<GeneratorKind, String> {
    name.parse().map_err(|e: tt_inherit::Error| e.to_string())
}

/// Rank, incoherence and condition number of each unfolding of an `n^4`
/// tensor with TT-rank (2, 3, 2).
pub fn incoherence_rows(n: usize, generator: &str, seed: u64) -> Result<Vec<UnfoldingRow>, String> {
    let c = config(n, kind(generator)?, seed, 1)?;
    let spec = GeneratorSpec::new(c.generators[0], c.shape().map_err(|e| e.to_string())?, RANKS.to_vec(), seed);
    let t = generate(&spec, c.rank_tol).map_err(|e| e.to_string())?.tensor;
    let a = TtAnalysis::new(&t, c.rank_tol).map_err(|e| e.to_string())?;
    Ok(a.reports()
        .iter()
        .map(|r| UnfoldingRow {
            i: r.i,
            rank: r.rank,
            mu1: r.mu.mu1,
            mu2: r.mu.mu2,
            kappa: r.kappa,
            sigma: r.sigma.clone(),
        })
        .collect())
}

/// One sampling trial: every α/β parameter with its bound-check flag.
pub fn trial_rows(n: usize, generator: &str, seed: u64) -> Result<Vec<ParamRow>, String> {
    let c = config(n, kind(generator)?, seed, 1)?;
    let r = run_trial(&c, c.generators[0], 0).map_err(|e| e.to_string())?;
    Ok(r.values
        .iter()
        .map(|v| ParamRow {
            label: v.key.label(),
            value: v.value,
            bound_pass: v.bound_pass,
        })
        .collect())
}

/// Boxplots of every parameter over `trials` sequential trials.
pub fn boxplot_svg_text(n: usize, generator: &str, trials: usize, seed: u64) -> Result<String, String> {
    let c = config(n, kind(generator)?, seed, trials)?;
    let results = (0..trials)
        .map(|t| run_trial(&c, c.generators[0], t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let sums = summarize(&results, 4).map_err(|e| e.to_string())?;
    let title = format!("{generator} cores, {n}^4, {trials} trials");
    Ok(render_boxplots(&title, &sums[&c.generators[0]]))
}

fn js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn incoherence(n: u32, generator: &str, seed: u32) -> Result<String, JsValue> {
    js(incoherence_rows(n as usize, generator, seed as u64))
}

#[wasm_bindgen]
pub fn sample_trial(n: u32, generator: &str, seed: u32) -> Result<String, JsValue> {
    js(trial_rows(n as usize, generator, seed as u64))
}

#[wasm_bindgen]
pub fn boxplot_svg(n: u32, generator: &str, trials: u32, seed: u32) -> Result<String, JsValue> {
    boxplot_svg_text(n as usize, generator, trials as usize, seed as u64).map_err(|e| JsValue::from_str(&e))
}
