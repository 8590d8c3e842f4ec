//! Browser bindings for the groverlab demo page.
//!
//! Each export takes plain numbers and strings and returns a JSON string, so the
//! page needs no generated TypeScript types. The `*_json` functions hold the logic
//! and are tested natively.

use groverlab::circuit::{format_bitstring, parse_bitstring};
use groverlab::grover::optimal_repetitions;
use groverlab::qasm::export_qasm;
use groverlab::sim::exact_distribution;
use groverlab::transpile::{metrics, transpile, CircuitMetrics, TranspileOptions};
use groverlab::{
    build_grover, run_ideal, run_noisy, selectivity, theoretical_success, GroverSpec, NoiseModel,
    SelectivityReport, Variant,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Keeps state vectors small enough for an interactive page.
pub const MAX_DEMO_QUBITS: usize = 12;
pub const MAX_DEMO_SHOTS: u32 = 50_000;

fn spec(n: usize, goal: &str, r: usize, variant: &str) -> Result<GroverSpec, String> {
    let variant: Variant = variant.parse().map_err(|e: groverlab::Error| e.to_string())?;
    if n + variant.n_ancilla() > MAX_DEMO_QUBITS {
        return Err(format!("the demo is limited to {MAX_DEMO_QUBITS} qubits"));
    }
    let goal = parse_bitstring(goal, n).map_err(|e| e.to_string())?;
    GroverSpec::new(n, goal, r, variant).map_err(|e| e.to_string())
}

fn labels(n: usize) -> Vec<String> {
    (0..1usize << n).map(|i| format_bitstring(i, n)).collect()
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CurvePoint {
    r: usize,
    simulated: f64,
    closed_form: f64,
}

#[derive(Serialize)]
struct IdealView {
    labels: Vec<String>,
    probs: Vec<f64>,
    selectivity: SelectivityReport,
    optimal_r: usize,
    curve: Vec<CurvePoint>,
}

pub fn ideal_json(n: usize, goal: &str, r: usize, variant: &str) -> Result<String, String> {
    let spec = spec(n, goal, r, variant)?;
    let run = |spec: &GroverSpec| -> Result<Vec<f64>, String> {
        let c = build_grover(spec).map_err(|e| e.to_string())?;
        let state = run_ideal(&c).map_err(|e| e.to_string())?;
        Ok(exact_distribution(&state, c.measured()).map_err(|e| e.to_string())?.probs)
    };
    let probs = run(&spec)?;
    let optimal_r = optimal_repetitions(spec.search_space()).map_err(|e| e.to_string())?;
    let curve = (0..=(2 * optimal_r).max(r))
        .map(|k| {
            let p = run(&GroverSpec { repetitions: k, ..spec })?;
            Ok(CurvePoint {
                r: k,
                simulated: p[spec.goal],
                closed_form: theoretical_success(spec.search_space(), k),
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    to_json(&IdealView {
        labels: labels(n),
        selectivity: selectivity(&probs[..], spec.goal).map_err(|e| e.to_string())?,
        probs,
        optimal_r,
        curve,
    })
}

#[derive(Serialize)]
struct NoisyView {
    labels: Vec<String>,
    counts: Vec<u64>,
    shots: u64,
    selectivity: SelectivityReport,
    metrics: CircuitMetrics,
}

/// Depolarizing noise with `p1 = p2 = p` on the decomposed circuit.
#[allow(clippy::too_many_arguments)]
pub fn noisy_json(
    n: usize,
    goal: &str,
    r: usize,
    variant: &str,
    p: f64,
    eps_ro: f64,
    shots: u32,
    seed: u32,
) -> Result<String, String> {
    let spec = spec(n, goal, r, variant)?;
    if shots == 0 || shots > MAX_DEMO_SHOTS {
        return Err(format!("shots must be between 1 and {MAX_DEMO_SHOTS}"));
    }
    let model = NoiseModel::new(p, p, eps_ro).map_err(|e| e.to_string())?;
    let c = build_grover(&spec)
        .and_then(|c| transpile(&c, &TranspileOptions::decomposed()))
        .map_err(|e| e.to_string())?;
    let hist = run_noisy(&c, &model, u64::from(shots), u64::from(seed)).map_err(|e| e.to_string())?;
    to_json(&NoisyView {
        labels: labels(n),
        selectivity: selectivity(&hist, spec.goal).map_err(|e| e.to_string())?,
        counts: hist.counts,
        shots: hist.shots,
        metrics: metrics(&c),
    })
}

#[derive(Serialize)]
struct CircuitView {
    abstract_metrics: CircuitMetrics,
    decomposed_metrics: CircuitMetrics,
    qasm: String,
}

pub fn circuit_json(n: usize, goal: &str, r: usize, variant: &str) -> Result<String, String> {
    let spec = spec(n, goal, r, variant)?;
    let c = build_grover(&spec).map_err(|e| e.to_string())?;
    let lowered = transpile(&c, &TranspileOptions::decomposed()).map_err(|e| e.to_string())?;
    to_json(&CircuitView {
        abstract_metrics: metrics(&c),
        decomposed_metrics: metrics(&lowered),
        qasm: export_qasm(&lowered).map_err(|e| e.to_string())?,
    })
}

fn js(result: Result<String, String>) -> Result<String, JsError> {
    result.map_err(|e| JsError::new(&e))
}

/// Exact outcome probabilities plus the success curve over repetitions.
#[wasm_bindgen]
pub fn ideal_distribution(n: usize, goal: &str, r: usize, variant: &str) -> Result<String, JsError> {
    js(ideal_json(n, goal, r, variant))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn noisy_histogram(
    n: usize,
    goal: &str,
    r: usize,
    variant: &str,
    p: f64,
    eps_ro: f64,
    shots: u32,
    seed: u32,
) -> Result<String, JsError> {
    js(noisy_json(n, goal, r, variant, p, eps_ro, shots, seed))
}

/// Gate metrics before and after decomposition, and the OpenQASM text.
#[wasm_bindgen]
pub fn circuit_report(n: usize, goal: &str, r: usize, variant: &str) -> Result<String, JsError> {
    js(circuit_json(n, goal, r, variant))
}
