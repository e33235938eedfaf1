//! Browser bindings. Every export returns a JSON string; failures come back
//! as `{"error": "..."}` so the page never has to catch exceptions.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use pulseforge::algebra::{gate_fidelity, rx};
use pulseforge::synth::{
    bangbang_synthesize, synthesize_angles, BangBangConfig, PulseProgram, PulseStage, Strategy,
    SynthConfig, Waveform,
};
use pulseforge::verify::{locality_residual, make_report, simulate_program};

/// Simulation steps used by the page; coarse enough to stay interactive.
const STEPS: usize = 1 << 12;
/// Points per plotted curve.
const POINTS: usize = 400;

fn respond<T: Serialize>(r: Result<T, String>) -> String {
    let value = match r {
        Ok(v) => serde_json::to_value(v),
        Err(e) => Ok(serde_json::json!({ "error": e })),
    };
    value.map_or_else(|e| format!("{{\"error\":\"{e}\"}}"), |v| v.to_string())
}

fn trace(program: &PulseProgram) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let total = program.duration();
    let (mut ts, mut w1, mut w2) = (vec![], vec![], vec![]);
    let mut offset = 0.0;
    for stage in &program.stages {
        let n = ((POINTS as f64 * stage.duration / total).ceil() as usize).max(2);
        for i in 0..=n {
            let t = stage.duration * i as f64 / n as f64;
            ts.push(offset + t);
            w1.push(stage.omega1.eval(t));
            w2.push(stage.omega2.eval(t));
        }
        offset += stage.duration;
    }
    (ts, w1, w2)
}

#[derive(Serialize)]
pub struct PulseView {
    pub strategy: &'static str,
    pub duration: f64,
    pub fidelity: f64,
    pub energy: f64,
    pub locality_residual: f64,
    pub t: Vec<f64>,
    pub omega1: Vec<f64>,
    pub omega2: Vec<f64>,
}

fn pulse_view(gamma1: f64, gamma2: f64, coupling: f64, strategy: &str) -> Result<PulseView, String> {
    let strategy: Strategy = strategy.parse().map_err(|e: pulseforge::Error| e.to_string())?;
    let cfg = SynthConfig { coupling, strategy, steps: STEPS, ..SynthConfig::default() };
    let s = synthesize_angles(gamma1, gamma2, &cfg).map_err(|e| e.to_string())?;
    let r = make_report(&rx(gamma1), &rx(gamma2), "demo", &s.program, coupling, STEPS).map_err(|e| e.to_string())?;
    let (t, omega1, omega2) = trace(&s.program);
    Ok(PulseView {
        strategy: strategy.name(),
        duration: r.duration,
        fidelity: r.fidelity,
        energy: r.energy.total,
        locality_residual: r.locality_residual,
        t,
        omega1,
        omega2,
    })
}

/// Pulse for `e^{−iγ1σx/2} ⊗ e^{−iγ2σx/2}` with the named strategy
/// (`approximate`, `optimized`, `min-energy`, `bang-bang`).
#[wasm_bindgen]
pub fn synthesize_pulse(gamma1: f64, gamma2: f64, coupling: f64, strategy: &str) -> String {
    respond(pulse_view(gamma1, gamma2, coupling, strategy))
}

#[derive(Serialize)]
pub struct SwitchView {
    pub duration: f64,
    pub switch_times: Vec<f64>,
    pub levels: Vec<f64>,
    pub fidelity: f64,
    pub method: String,
}

fn switch_view(theta: f64, coupling: f64, omega_min: f64, omega_max: f64) -> Result<SwitchView, String> {
    let sol = bangbang_synthesize(theta, coupling, omega_min, omega_max, &BangBangConfig::default()).map_err(|e| e.to_string())?;
    let s = &sol.schedule;
    Ok(SwitchView {
        duration: s.duration,
        switch_times: s.switch_times.clone(),
        levels: s.levels(),
        fidelity: sol.fidelity,
        method: format!("{:?}", sol.method),
    })
}

/// Time-optimal bounded control for `e^{−iθσx/2}` under `ωσx/2 + Jσy/2`.
#[wasm_bindgen]
pub fn bang_bang_schedule(theta: f64, coupling: f64, omega_min: f64, omega_max: f64) -> String {
    respond(switch_view(theta, coupling, omega_min, omega_max))
}

#[derive(Serialize)]
pub struct LocalityView {
    pub locality_residual: f64,
    /// Fidelity against the nearest product of single-qubit unitaries.
    pub nearest_product_fidelity: f64,
}

fn locality_view(amplitude: f64, frequency: f64, duration: f64, coupling: f64) -> Result<LocalityView, String> {
    let stage = PulseStage::new(Waveform::Sinusoid { amplitude, frequency }, Waveform::Zero, 0.0, duration, "probe")
        .map_err(|e| e.to_string())?;
    let u = simulate_program(&PulseProgram { stages: vec![stage] }, coupling, STEPS).map_err(|e| e.to_string())?;
    let loc = locality_residual(&u);
    let nearest_product_fidelity = loc.nearest.map_or(0.0, |(a, b)| gate_fidelity(&u, &a.kron(&b)));
    Ok(LocalityView { locality_residual: loc.residual, nearest_product_fidelity })
}

/// Drive qubit 1 with `A cos(υt)` for `T` and measure how entangling the result is.
#[wasm_bindgen]
pub fn locality_probe(amplitude: f64, frequency: f64, duration: f64, coupling: f64) -> String {
    respond(locality_view(amplitude, frequency, duration, coupling))
}
