//! Staged two-qubit synthesis: local target → XYX stage plan → per-stage
//! subproblem pair `(θa, θb) = (γ1 − γ2, γ1 + γ2)` → physical pulses.
//!
//! Both blocks of a stage must land on `s·e^{−iθσx/2}` with the same `s`;
//! otherwise the assembled stage differs from the target by a relative sign
//! between the blocks, which is an entangling error.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::bangbang::{bangbang_fixed_horizon, bangbang_synthesize, BangBangConfig, BangBangSolution};
use super::minenergy::{min_energy_with_sign, MinEnergySolution};
use super::sinusoid::{
    approx_params, optimize_stage_sinusoid, polish_block_sinusoid, BlockSinusoid, OptimizeConfig, SinusoidParams,
    StageSinusoid,
};
use super::{subproblem_propagator, target_overlap, PulseProgram, PulseStage, Waveform, DEFAULT_STEPS};
use crate::algebra::{rx, Unitary2};
use crate::decouple::{qubit_controls, stage_plan, subproblem_targets, Stage, StagePlan};
use crate::error::{Error, Result};
use crate::optimize::NelderMeadConfig;

/// Stage angles below this magnitude are treated as identity.
const IDENTITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Approximate,
    Optimized,
    MinEnergy,
    BangBang,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Approximate, Strategy::Optimized, Strategy::MinEnergy, Strategy::BangBang];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Approximate => "approximate",
            Strategy::Optimized => "optimized",
            Strategy::MinEnergy => "min-energy",
            Strategy::BangBang => "bang-bang",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown strategy {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// `J` in rad/s.
    pub coupling: f64,
    pub strategy: Strategy,
    /// Harmonic index `n` of the sinusoidal seeds; raised per stage to
    /// `⌈2 max|θ|/π⌉` by the optimizing strategies.
    pub harmonics: u32,
    /// Bang-bang bounds on the subproblem controls; `None` means `±5J`.
    pub bounds: Option<(f64, f64)>,
    pub steps: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { coupling: 200.0, strategy: Strategy::Approximate, harmonics: 1, bounds: None, steps: DEFAULT_STEPS, seed: 0 }
    }
}

impl SynthConfig {
    pub fn bounds(&self) -> (f64, f64) {
        self.bounds.unwrap_or((-5.0 * self.coupling, 5.0 * self.coupling))
    }

    fn optimize_config(&self) -> OptimizeConfig {
        OptimizeConfig { steps: self.steps, nelder_mead: NelderMeadConfig { seed: self.seed, ..NelderMeadConfig::default() } }
    }

    fn validate(&self) -> Result<()> {
        if !(self.coupling > 0.0) || !self.coupling.is_finite() {
            return Err(Error::invalid(format!("coupling must be positive, got {}", self.coupling)));
        }
        if self.harmonics == 0 {
            return Err(Error::invalid("harmonic index n must be ≥ 1"));
        }
        if self.steps == 0 {
            return Err(Error::invalid("steps must be ≥ 1"));
        }
        let (lo, hi) = self.bounds();
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid(format!("bad bang-bang bounds ({lo}, {hi})")));
        }
        Ok(())
    }
}

/// Strategy-specific record of how a stage was solved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "kebab-case")]
pub enum StageParameters {
    Approximate { a: SinusoidParams, b: SinusoidParams },
    Optimized { carrier: StageSinusoid, a: BlockSinusoid, b: BlockSinusoid },
    MinEnergy { carrier: StageSinusoid, a: MinEnergySolution, b: MinEnergySolution },
    BangBang { a: BangBangSolution, b: BangBangSolution },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageOutcome {
    /// Position in the plan (0 runs first).
    pub index: usize,
    pub stage: Stage,
    pub theta_a: f64,
    pub theta_b: f64,
    /// `|Tr(U_a†T_a) + Tr(U_b†T_b)|/4` from re-simulating both blocks,
    /// block b with drift `−J`.
    pub block_fidelity: f64,
    pub parameters: StageParameters,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Synthesis {
    pub strategy: Strategy,
    pub program: PulseProgram,
    pub plan: Option<StagePlan>,
    pub stages: Vec<StageOutcome>,
}

/// Synthesize the local unitary `first ⊗ second` as three stages.
pub fn synthesize_local(first: &Unitary2, second: &Unitary2, config: &SynthConfig) -> Result<Synthesis> {
    config.validate()?;
    let plan = stage_plan(first, second);
    let mut synthesis = Synthesis { strategy: config.strategy, program: PulseProgram::default(), plan: Some(plan), stages: vec![] };
    for (index, stage) in plan.stages.iter().enumerate() {
        push_stage(&mut synthesis, index, *stage, config).map_err(|e| e.in_stage(index))?;
    }
    Ok(synthesis)
}

/// Synthesize `e^{−iγ1σx/2} ⊗ e^{−iγ2σx/2}` as one stage with phase 0.
pub fn synthesize_angles(gamma1: f64, gamma2: f64, config: &SynthConfig) -> Result<Synthesis> {
    config.validate()?;
    if !gamma1.is_finite() || !gamma2.is_finite() {
        return Err(Error::invalid("target angles must be finite"));
    }
    let mut synthesis = Synthesis { strategy: config.strategy, program: PulseProgram::default(), plan: None, stages: vec![] };
    push_stage(&mut synthesis, 0, Stage { phase: 0.0, angles: (gamma1, gamma2) }, config)?;
    Ok(synthesis)
}

fn push_stage(synthesis: &mut Synthesis, index: usize, stage: Stage, config: &SynthConfig) -> Result<()> {
    let (g1, g2) = stage.angles;
    if g1.abs() < IDENTITY_TOL && g2.abs() < IDENTITY_TOL {
        return Ok(());
    }
    let (theta_a, theta_b) = subproblem_targets(g1, g2);
    let j = config.coupling;
    let (wa, wb, duration, parameters) = match config.strategy {
        Strategy::Approximate => {
            let a = approx_params(theta_a, j, config.harmonics)?;
            let b = approx_params(theta_b, j, config.harmonics)?;
            (a.waveform(), b.waveform(), a.duration, StageParameters::Approximate { a, b })
        }
        Strategy::Optimized => {
            let carrier = optimized_stage(theta_a, theta_b, config)?;
            let cfg = config.optimize_config();
            let polish = |theta: f64, amplitude: f64| {
                polish_block_sinusoid(theta, carrier.sign, j, carrier.duration, amplitude, carrier.frequency, &cfg)
            };
            let a = polish(theta_a, carrier.amplitude_a)?;
            let b = polish(theta_b, carrier.amplitude_b)?;
            (a.waveform(), b.waveform(), carrier.duration, StageParameters::Optimized { carrier, a, b })
        }
        Strategy::MinEnergy => {
            let carrier = optimized_stage(theta_a, theta_b, config)?;
            let cfg = config.optimize_config();
            let seed = |amplitude: f64| SinusoidParams {
                amplitude,
                frequency: carrier.frequency,
                harmonics: carrier.harmonics,
                duration: carrier.duration,
            };
            let t = carrier.duration;
            let a = min_energy_with_sign(theta_a, Some(carrier.sign), j, t, &seed(carrier.amplitude_a), &cfg)?;
            let b = min_energy_with_sign(theta_b, Some(carrier.sign), j, t, &seed(carrier.amplitude_b), &cfg)?;
            (a.control.waveform(), b.control.waveform(), t, StageParameters::MinEnergy { carrier, a, b })
        }
        Strategy::BangBang => {
            let (a, b) = bangbang_stage(theta_a, theta_b, config)?;
            let t = a.schedule.duration;
            (a.schedule.waveform(), b.schedule.waveform(), t, StageParameters::BangBang { a, b })
        }
    };
    let block_fidelity = block_fidelity(&wa, &wb, theta_a, theta_b, j, duration, config.steps)?;
    let (w1, w2) = physical_waveforms(&wa, &wb);
    let label = format!("stage-{index}");
    synthesis.program.stages.push(PulseStage::new(w1, w2, stage.phase, duration, label)?);
    synthesis.stages.push(StageOutcome { index, stage, theta_a, theta_b, block_fidelity, parameters });
    Ok(())
}

/// `⌈2 max|θ|/π⌉`, at least the configured `n`: keeps `|A| ≲ J/2` in the seed.
fn effective_harmonics(theta_a: f64, theta_b: f64, configured: u32) -> u32 {
    let need = (2.0 * theta_a.abs().max(theta_b.abs()) / PI).ceil() as u32;
    configured.max(need).max(1)
}

fn optimized_stage(theta_a: f64, theta_b: f64, config: &SynthConfig) -> Result<StageSinusoid> {
    let n = effective_harmonics(theta_a, theta_b, config.harmonics);
    optimize_stage_sinusoid(theta_a, theta_b, config.coupling, n, &config.optimize_config())
}

/// `(ω1, ω2) = ((ωa + ωb)/2, (ωb − ωa)/2)`, kept in closed form where possible.
fn physical_waveforms(wa: &Waveform, wb: &Waveform) -> (Waveform, Waveform) {
    if let (Waveform::Sinusoid { amplitude: a, frequency: va }, Waveform::Sinusoid { amplitude: b, frequency: vb }) = (wa, wb) {
        if va == vb {
            let (w1, w2) = qubit_controls(*a, *b);
            let w = |x: f64| if x == 0.0 { Waveform::Zero } else { Waveform::Sinusoid { amplitude: x, frequency: *va } };
            return (w(w1), w(w2));
        }
    }
    (Waveform::combine(0.5, wa, 0.5, wb), Waveform::combine(-0.5, wa, 0.5, wb))
}

fn block_fidelity(wa: &Waveform, wb: &Waveform, theta_a: f64, theta_b: f64, j: f64, t: f64, steps: usize) -> Result<f64> {
    let ua = subproblem_propagator(wa, 1.0, j, t, steps)?;
    let ub = subproblem_propagator(wb, -1.0, j, t, steps)?;
    Ok(((target_overlap(&ua, theta_a) + target_overlap(&ub, theta_b)).norm() / 4.0).min(1.0))
}

/// Sign `e` with `U ≈ e·rx(θ)`.
fn sign_against(u: &Unitary2, theta: f64) -> f64 {
    if target_overlap(u, theta).re >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn signed_rx(theta: f64, sign: f64) -> Unitary2 {
    let r = rx(theta);
    if sign < 0.0 {
        r.with_phase(PI)
    } else {
        r
    }
}

/// Both blocks on a common horizon and common sign: the slower block's time
/// and sign are kept and the faster block is re-solved on that horizon; if
/// that fails the horizon is stretched and both are re-solved.
fn bangbang_stage(theta_a: f64, theta_b: f64, config: &SynthConfig) -> Result<(BangBangSolution, BangBangSolution)> {
    let (lo, hi) = config.bounds();
    let j = config.coupling;
    let bb = BangBangConfig {
        nelder_mead: NelderMeadConfig { seed: config.seed, ..BangBangConfig::default().nelder_mead },
        ..BangBangConfig::default()
    };
    let a = bangbang_synthesize(theta_a, j, lo, hi, &bb)?;
    let b = bangbang_synthesize(theta_b, j, lo, hi, &bb)?;
    let sign = |s: &BangBangSolution, theta: f64| sign_against(&s.schedule.propagator(j), theta);
    let a_slower = a.schedule.duration >= b.schedule.duration;
    let (slow, theta_slow, theta_fast) = if a_slower { (&a, theta_a, theta_b) } else { (&b, theta_b, theta_a) };
    let horizon = slow.schedule.duration;
    let order = |slow: BangBangSolution, fast: BangBangSolution| if a_slower { (slow, fast) } else { (fast, slow) };
    if horizon > 0.0 {
        let e = sign(slow, theta_slow);
        if let Ok(fast) = bangbang_fixed_horizon(&signed_rx(theta_fast, e), j, (lo, hi), horizon, &bb) {
            return Ok(order(slow.clone(), fast));
        }
    }
    let scale = 2.0 * PI / lo.abs().max(hi.abs()).hypot(j);
    let base = horizon.max(scale);
    for k in 1..=8 {
        let t = base * (1.0 + 0.25 * k as f64);
        for e in [1.0, -1.0] {
            let sa = bangbang_fixed_horizon(&signed_rx(theta_a, e), j, (lo, hi), t, &bb);
            let sb = bangbang_fixed_horizon(&signed_rx(theta_b, e), j, (lo, hi), t, &bb);
            if let (Ok(sa), Ok(sb)) = (sa, sb) {
                log::info!("bang-bang stage needed a stretched common horizon {t:e} s");
                return Ok((sa, sb));
            }
        }
    }
    Err(Error::SynthesisFailure {
        reason: "no common-horizon bang-bang schedules with a common sign".into(),
        best_fidelity: 0.0,
    })
}
