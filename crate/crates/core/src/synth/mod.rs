//! Control synthesis for the decoupled subproblems and the staged two-qubit
//! pipeline built on them.
//!
//! Every subproblem is `i U' = (ω σx/2 + s J σy/2) U` with target
//! `e^{−iθσx/2}`. Conjugation by σx flips `s` and fixes the target, so a
//! control solving the `s = +1` problem solves the `s = −1` one with the
//! same SU(2) sign; all solvers below work with `s = +1`.

mod bangbang;
mod minenergy;
mod pipeline;
mod sinusoid;
mod waveform;
mod weinorman;

pub use bangbang::{
    bangbang_direct_search, bangbang_fixed_horizon, bangbang_synthesize, shoot_bangbang, BangBangConfig,
    BangBangMethod, BangBangSchedule, BangBangSolution, Level,
};
pub use minenergy::{
    elliptic_initial_costate, min_energy_synthesize, EllipticParams, MinEnergyControl, MinEnergySolution,
};
pub use pipeline::{synthesize_angles, synthesize_local, StageOutcome, StageParameters, Strategy, SynthConfig, Synthesis};
pub use sinusoid::{
    approx_params, approx_two_qubit, fidelity_optimize, optimize_stage_sinusoid, polish_block_sinusoid, BlockSinusoid,
    OptimizeConfig, OptimizedSinusoid, SinusoidParams, StageSinusoid,
};
pub use waveform::Waveform;
pub use weinorman::{
    rotating_frame_hamiltonian, wei_norman_integrate, wei_norman_predict, WeiNormanAngles, WeiNormanPrediction,
};

pub(crate) use waveform::for_each_piece;

use serde::{Deserialize, Serialize};

use crate::algebra::{propagate2, rx, Hamiltonian2, Unitary2, C64};
use crate::error::{Error, Result};

/// Default midpoint steps per stage, both for synthesis and verification.
pub const DEFAULT_STEPS: usize = 1 << 14;

/// One stage: both qubits driven for the same duration with fixed phases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseStage {
    pub omega1: Waveform,
    pub omega2: Waveform,
    pub phi1: f64,
    pub phi2: f64,
    pub duration: f64,
    pub label: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PulseProgram {
    pub stages: Vec<PulseStage>,
}

impl PulseStage {
    pub fn new(omega1: Waveform, omega2: Waveform, phase: f64, duration: f64, label: impl Into<String>) -> Result<Self> {
        if !(duration >= 0.0) || !duration.is_finite() {
            return Err(Error::invalid(format!("stage duration must be finite and ≥ 0, got {duration}")));
        }
        if !phase.is_finite() {
            return Err(Error::invalid("stage phase must be finite"));
        }
        Ok(PulseStage { omega1, omega2, phi1: phase, phi2: phase, duration, label: label.into() })
    }

    /// Union of both channels' discontinuities.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.omega1.breakpoints();
        b.extend(self.omega2.breakpoints());
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

impl PulseProgram {
    pub fn duration(&self) -> f64 {
        self.stages.iter().map(|s| s.duration).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }
}

/// `½∫ω² dt` by the trapezoidal rule on `steps` intervals, split at the
/// waveform's breakpoints so that piecewise-constant signals are exact.
pub fn waveform_energy(omega: &Waveform, duration: f64, steps: usize) -> f64 {
    if duration <= 0.0 || omega.is_zero() {
        return 0.0;
    }
    let mut acc = 0.0;
    for_each_piece(duration, &omega.breakpoints(), steps, |start, len, n| {
        let h = len / n as f64;
        // Evaluate just inside the piece so one-sided limits are used at breaks.
        let inner = |t: f64| omega.eval(t.clamp(start + 1e-12 * len, start + len * (1.0 - 1e-12)));
        let mut s = 0.5 * (inner(start).powi(2) + inner(start + len).powi(2));
        for i in 1..n {
            s += omega.eval(start + i as f64 * h).powi(2);
        }
        acc += s * h;
    });
    0.5 * acc
}

/// Energies `(E1, E2)` of the two qubit channels, summed over stages.
pub fn qubit_energies(program: &PulseProgram) -> (f64, f64) {
    program.stages.iter().fold((0.0, 0.0), |(a, b), s| {
        (
            a + waveform_energy(&s.omega1, s.duration, DEFAULT_STEPS),
            b + waveform_energy(&s.omega2, s.duration, DEFAULT_STEPS),
        )
    })
}

/// Total control energy `½∫(ω1² + ω2²) dt` (rad²/s).
pub fn energy_cost(program: &PulseProgram) -> f64 {
    let (a, b) = qubit_energies(program);
    a + b
}

/// Propagator of the subproblem `ω σx/2 + s J σy/2` over `[0, T]`.
pub fn subproblem_propagator(
    omega: &Waveform,
    drift_sign: f64,
    coupling: f64,
    duration: f64,
    steps: usize,
) -> Result<Unitary2> {
    let mut u = Unitary2::identity();
    let mut failure = None;
    for_each_piece(duration, &omega.breakpoints(), steps, |start, len, n| {
        if failure.is_some() {
            return;
        }
        match propagate2(
            |t| Hamiltonian2::new(omega.eval(start + t), drift_sign * coupling, 0.0),
            len,
            n,
        ) {
            Ok(piece) => u = piece * u,
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(u),
    }
}

/// `Tr(e^{−iθσx/2}† U)`.
pub(crate) fn target_overlap(u: &Unitary2, theta: f64) -> C64 {
    rx(theta).matrix().hs_inner(u.matrix())
}

/// Phase-invariant subproblem fidelity against `e^{−iθσx/2}`.
pub fn subproblem_fidelity(
    omega: &Waveform,
    theta: f64,
    coupling: f64,
    duration: f64,
    steps: usize,
) -> Result<f64> {
    let u = subproblem_propagator(omega, 1.0, coupling, duration, steps)?;
    Ok((target_overlap(&u, theta).norm() / 2.0).min(1.0))
}

/// Representative of `θ` in `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * std::f64::consts::PI);
    if t >= 2.0 * std::f64::consts::PI {
        0.0
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn energy_examples() {
        let t = 0.7;
        assert!((waveform_energy(&Waveform::PiecewiseConstant { levels: vec![3.0], switch_times: vec![] }, t, 64) - 9.0 * t / 2.0).abs() < 1e-12);
        let (a, v) = (100.0, 200.0);
        let tt = 2.0 * PI / v;
        let e = waveform_energy(&Waveform::Sinusoid { amplitude: a, frequency: v }, tt, DEFAULT_STEPS);
        assert!((e - a * a * tt / 4.0).abs() <= 1e-6 * e);
        assert_eq!(waveform_energy(&Waveform::Zero, 1.0, 10), 0.0);
        let pc = Waveform::PiecewiseConstant { levels: vec![1.0, -2.0], switch_times: vec![0.3] };
        assert!((waveform_energy(&pc, 1.0, 7) - 0.5 * (0.3 + 4.0 * 0.7)).abs() < 1e-12);
    }

    #[test]
    fn piecewise_constant_is_exact_product() {
        let j = 200.0;
        let pc = Waveform::PiecewiseConstant { levels: vec![500.0, -500.0, 300.0], switch_times: vec![0.001, 0.004] };
        let u = subproblem_propagator(&pc, 1.0, j, 0.005, 10).unwrap();
        let seg = |w: f64, d: f64| Hamiltonian2::new(w, j, 0.0).evolve(d);
        // Later segments act on the left.
        let ordered = seg(300.0, 0.001) * seg(-500.0, 0.003) * seg(500.0, 0.001);
        assert!(u.distance(&ordered) < 1e-12);
    }

    #[test]
    fn drift_sign_symmetry() {
        let w = Waveform::Sinusoid { amplitude: 123.0, frequency: 190.0 };
        let up = subproblem_propagator(&w, 1.0, 200.0, 0.03, 4096).unwrap();
        let down = subproblem_propagator(&w, -1.0, 200.0, 0.03, 4096).unwrap();
        for theta in [0.3, PI / 2.0, 2.5] {
            let a = target_overlap(&up, theta);
            let b = target_overlap(&down, theta);
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_angle(-PI / 2.0), 1.5 * PI);
        assert_eq!(normalize_angle(2.0 * PI), 0.0);
        assert_eq!(normalize_angle(1.0), 1.0);
    }
}
