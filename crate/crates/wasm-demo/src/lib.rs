//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function takes plain numbers, runs one experiment and
//! returns a JSON string; errors come back as JS exceptions carrying the
//! error message.

use fairrel::examination::ExamSpec;
use fairrel::experiments::{insertion_sim, sliding_windows, synthetic_popularity_run, InsertionConfig, SyntheticConfig};
use fairrel::metrics::{evaluate, JointConfig, Measure};
use fairrel::rerank::combmnz_rerank;
use serde::Serialize;
use wasm_bindgen::prelude::*;

// the demo page must stay responsive
const MAX_INSERTION_ITEMS: usize = 20_000;
const MAX_SYNTHETIC_ITEMS: usize = 5_000;

#[derive(Serialize)]
struct Curve {
    name: &'static str,
    weights: Vec<f64>,
}

#[derive(Serialize)]
struct Series {
    measure: Measure,
    values: Vec<f64>,
}

#[derive(Serialize)]
struct Trajectory {
    steps: Vec<usize>,
    series: Vec<Series>,
}

#[derive(Serialize)]
struct Comparison {
    windows: Vec<String>,
    series: Vec<Series>,
    /// (measure, original, re-ranked)
    rerank: Vec<(Measure, f64, f64)>,
}

fn parse_measures(list: &str) -> Result<Vec<Measure>, String> {
    if list.trim().is_empty() {
        return Ok(Measure::ALL.to_vec());
    }
    list.split(',').map(|s| s.parse().map_err(|e: fairrel::Error| e.to_string())).collect()
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// Exposure weights of the five examination functions for ranks `1..=k+2`
/// (the last two show the cutoff).
pub fn examination_curves_json(k: usize, gamma: f64) -> Result<String, String> {
    let specs = [
        ExamSpec::Linear,
        ExamSpec::NormalizedLinear,
        ExamSpec::Dcg,
        ExamSpec::rbp(gamma).map_err(|e| e.to_string())?,
        ExamSpec::Inverse,
    ];
    let curves = specs
        .iter()
        .map(|s| {
            let weights = (1..=k + 2).map(|z| s.weight(z, k)).collect::<Result<_, _>>()?;
            Ok(Curve { name: s.name(), weights })
        })
        .collect::<Result<Vec<_>, fairrel::Error>>()
        .map_err(|e| e.to_string())?;
    to_json(&curves)
}

/// Measure values at every step of the artificial insertion experiment.
pub fn insertion_json(users: usize, items: usize, k: usize, seed: u64, measures: &str) -> Result<String, String> {
    if items > MAX_INSERTION_ITEMS {
        return Err(format!("at most {MAX_INSERTION_ITEMS} items in the browser"));
    }
    let wanted = parse_measures(measures)?;
    let cfg = InsertionConfig { users, items, k, seed };
    let traj = insertion_sim(&cfg, &JointConfig::default().with_k(k), &wanted).map_err(|e| e.to_string())?;
    to_json(&Trajectory {
        steps: traj.steps.iter().map(|s| s.inserted).collect(),
        series: wanted
            .into_iter()
            .map(|m| Series { measure: m, values: traj.series(m) })
            .collect(),
    })
}

/// Five sliding windows of size 5 over a synthetic popularity-biased run,
/// plus the effect of CombMNZ re-ranking (k'=25 -> k=10) on the same run.
pub fn popularity_json(users: usize, items: usize, skew: f64, seed: u64, measures: &str) -> Result<String, String> {
    if items > MAX_SYNTHETIC_ITEMS {
        return Err(format!("at most {MAX_SYNTHETIC_ITEMS} items in the browser"));
    }
    let wanted = parse_measures(measures)?;
    let cfg = SyntheticConfig { users, items, skew, seed, ..SyntheticConfig::default() };
    let (run, rel) = synthetic_popularity_run(&cfg).map_err(|e| e.to_string())?;
    let joint = JointConfig::default();
    let windows = sliding_windows(&run, &rel, &joint, &wanted, 5, 5).map_err(|e| e.to_string())?;
    let (reranked, _) = combmnz_rerank(&run, 25, joint.k).map_err(|e| e.to_string())?;
    // the truncated re-ranking has no full rankings to offer
    let rerank_measures: Vec<Measure> = wanted.iter().copied().filter(|&m| m != Measure::IfdDiv).collect();
    let before = evaluate(&run, &rel, &joint, &rerank_measures).map_err(|e| e.to_string())?;
    let after = evaluate(&reranked, &rel, &joint, &rerank_measures).map_err(|e| e.to_string())?;
    to_json(&Comparison {
        windows: windows.iter().map(|w| format!("{}-{}", w.start, w.end)).collect(),
        series: wanted
            .iter()
            .map(|&m| Series {
                measure: m,
                values: windows.iter().map(|w| w.report.get(m).unwrap_or(f64::NAN)).collect(),
            })
            .collect(),
        rerank: rerank_measures
            .into_iter()
            .map(|m| (m, before.get(m).unwrap_or(f64::NAN), after.get(m).unwrap_or(f64::NAN)))
            .collect(),
    })
}

#[wasm_bindgen]
pub fn examination_curves(k: usize, gamma: f64) -> Result<String, JsValue> {
    examination_curves_json(k, gamma).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn insertion(users: usize, items: usize, k: usize, seed: u32, measures: &str) -> Result<String, JsValue> {
    insertion_json(users, items, k, seed.into(), measures).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn popularity(users: usize, items: usize, skew: f64, seed: u32, measures: &str) -> Result<String, JsValue> {
    popularity_json(users, items, skew, seed.into(), measures).map_err(|e| JsValue::from_str(&e))
}
