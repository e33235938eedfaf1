use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{subproblem_fidelity, subproblem_propagator, target_overlap, PulseProgram, PulseStage, Waveform, DEFAULT_STEPS};
use crate::error::{Error, Result};
use crate::optimize::{nelder_mead, NelderMeadConfig};

/// `ω(t) = A cos(υt)` on `[0, T]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinusoidParams {
    pub amplitude: f64,
    pub frequency: f64,
    pub harmonics: u32,
    pub duration: f64,
}

impl SinusoidParams {
    pub fn waveform(&self) -> Waveform {
        if self.amplitude == 0.0 {
            Waveform::Zero
        } else {
            Waveform::Sinusoid { amplitude: self.amplitude, frequency: self.frequency }
        }
    }
}

/// Closed-form sinusoid `(A, υ, T) = (γJ/(nπ), J, 2nπ/J)`.
///
/// Any finite `γ` is accepted; `|γ| ≤ π` keeps `A ≤ J/n`, where the
/// approximation is accurate.
pub fn approx_params(gamma: f64, coupling: f64, harmonics: u32) -> Result<SinusoidParams> {
    if !(coupling > 0.0) || !coupling.is_finite() {
        return Err(Error::invalid(format!("coupling must be positive, got {coupling}")));
    }
    if harmonics == 0 {
        return Err(Error::invalid("harmonic index n must be ≥ 1"));
    }
    if !gamma.is_finite() {
        return Err(Error::invalid("target angle must be finite"));
    }
    let n = f64::from(harmonics);
    Ok(SinusoidParams {
        amplitude: gamma * coupling / (n * PI),
        frequency: coupling,
        harmonics,
        duration: 2.0 * n * PI / coupling,
    })
}

/// Single-stage program `ω_j = γ_j J/(nπ) cos(Jt)`, phases zero.
pub fn approx_two_qubit(gamma1: f64, gamma2: f64, coupling: f64, harmonics: u32) -> Result<PulseProgram> {
    let p1 = approx_params(gamma1, coupling, harmonics)?;
    let p2 = approx_params(gamma2, coupling, harmonics)?;
    Ok(PulseProgram {
        stages: vec![PulseStage::new(p1.waveform(), p2.waveform(), 0.0, p1.duration, "approximate")?],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeConfig {
    pub steps: usize,
    pub nelder_mead: NelderMeadConfig,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig { steps: DEFAULT_STEPS, nelder_mead: NelderMeadConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizedSinusoid {
    pub params: SinusoidParams,
    pub fidelity: f64,
    pub seed_fidelity: f64,
    pub evaluations: usize,
}

fn sinusoid_fidelity(a: f64, v: f64, t: f64, theta: f64, coupling: f64, steps: usize) -> f64 {
    if !(t > 0.0) {
        return f64::NAN;
    }
    let w = Waveform::Sinusoid { amplitude: a, frequency: v };
    subproblem_fidelity(&w, theta, coupling, t, steps).unwrap_or(f64::NAN)
}

/// Nelder–Mead over `(A, υ, T)` maximizing the subproblem fidelity.
///
/// Coordinates are scaled by `s = max(J, |υ|, |A|)` so the simplex is
/// roughly isotropic.
pub fn fidelity_optimize(
    seed: &SinusoidParams,
    target_angle: f64,
    coupling: f64,
    config: &OptimizeConfig,
) -> Result<OptimizedSinusoid> {
    if !(seed.duration > 0.0) || !seed.amplitude.is_finite() || !seed.frequency.is_finite() {
        return Err(Error::invalid("seed must have finite parameters and T > 0"));
    }
    let mut s = coupling.max(seed.frequency.abs()).max(seed.amplitude.abs());
    if s == 0.0 {
        s = 1.0 / seed.duration;
    }
    let steps = config.steps;
    let objective = |x: &[f64]| 1.0 - sinusoid_fidelity(x[0] * s, x[1] * s, x[2] / s, target_angle, coupling, steps);
    let x0 = [seed.amplitude / s, seed.frequency / s, seed.duration * s];
    let seed_fidelity = 1.0 - objective(&x0);
    let span = [
        if seed.amplitude != 0.0 { 0.05 * x0[0] } else { 0.05 },
        if seed.frequency != 0.0 { 0.02 * x0[1] } else { 0.02 },
        0.02 * x0[2],
    ];
    let m = nelder_mead(objective, &x0, &span, &config.nelder_mead);
    let fidelity = 1.0 - m.value;
    if !(fidelity >= seed_fidelity) {
        return Err(Error::OptimizationFailure { achieved: fidelity, seed: seed_fidelity, evaluations: m.evaluations });
    }
    log::debug!("fidelity_optimize: {seed_fidelity} -> {fidelity} in {} evaluations", m.evaluations);
    Ok(OptimizedSinusoid {
        params: SinusoidParams {
            amplitude: m.x[0] * s,
            frequency: m.x[1] * s,
            harmonics: seed.harmonics,
            duration: m.x[2] / s,
        },
        fidelity,
        seed_fidelity,
        evaluations: m.evaluations,
    })
}

/// Shared-carrier sinusoids `ω_a = A_a cos υt`, `ω_b = A_b cos υt` solving
/// both subproblems of one stage with a common SU(2) sign.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageSinusoid {
    pub amplitude_a: f64,
    pub amplitude_b: f64,
    pub frequency: f64,
    pub duration: f64,
    pub harmonics: u32,
    /// `|Tr(U_a†T_a) + Tr(U_b†T_b)|/4`, the 4×4 fidelity of the assembled stage.
    pub fidelity: f64,
    pub seed_fidelity: f64,
    /// Common sign `s` with `U_{a,b} ≈ s·e^{−iθσx/2}`.
    pub sign: f64,
    pub evaluations: usize,
}

fn stage_overlap(aa: f64, ab: f64, v: f64, t: f64, thetas: (f64, f64), coupling: f64, steps: usize) -> Option<num_complex::Complex64> {
    if !(t > 0.0) {
        return None;
    }
    let ua = subproblem_propagator(&Waveform::Sinusoid { amplitude: aa, frequency: v }, 1.0, coupling, t, steps).ok()?;
    let ub = subproblem_propagator(&Waveform::Sinusoid { amplitude: ab, frequency: v }, 1.0, coupling, t, steps).ok()?;
    Some(target_overlap(&ua, thetas.0) + target_overlap(&ub, thetas.1))
}

/// Four-parameter Nelder–Mead over `(A_a, A_b, υ, T)` from the closed-form seed.
pub fn optimize_stage_sinusoid(
    theta_a: f64,
    theta_b: f64,
    coupling: f64,
    harmonics: u32,
    config: &OptimizeConfig,
) -> Result<StageSinusoid> {
    let pa = approx_params(theta_a, coupling, harmonics)?;
    let pb = approx_params(theta_b, coupling, harmonics)?;
    let s = coupling;
    let steps = config.steps;
    let thetas = (theta_a, theta_b);
    let objective = |x: &[f64]| match stage_overlap(x[0] * s, x[1] * s, x[2] * s, x[3] / s, thetas, coupling, steps) {
        Some(z) => 1.0 - z.norm() / 4.0,
        None => f64::NAN,
    };
    let x0 = [pa.amplitude / s, pb.amplitude / s, pa.frequency / s, pa.duration * s];
    let seed_fidelity = 1.0 - objective(&x0);
    let span = [0.05, 0.05, 0.02, 0.02 * x0[3]];
    let m = nelder_mead(objective, &x0, &span, &config.nelder_mead);
    let (aa, ab, v, t) = (m.x[0] * s, m.x[1] * s, m.x[2] * s, m.x[3] / s);
    let z = stage_overlap(aa, ab, v, t, thetas, coupling, steps)
        .ok_or_else(|| Error::invalid("optimizer left the admissible region"))?;
    let fidelity = (z.norm() / 4.0).min(1.0);
    if !(fidelity >= seed_fidelity) {
        return Err(Error::OptimizationFailure { achieved: fidelity, seed: seed_fidelity, evaluations: m.evaluations });
    }
    Ok(StageSinusoid {
        amplitude_a: aa,
        amplitude_b: ab,
        frequency: v,
        duration: t,
        harmonics,
        fidelity,
        seed_fidelity,
        sign: if z.re >= 0.0 { 1.0 } else { -1.0 },
        evaluations: m.evaluations,
    })
}

/// One block of an optimized stage: `A cos(υt + ψ)` on the stage horizon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSinusoid {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
    /// `s·Re Tr(e^{iθσx/2} U)/2` for the stage sign `s`.
    pub signed_fidelity: f64,
    pub evaluations: usize,
}

impl BlockSinusoid {
    pub fn waveform(&self) -> Waveform {
        if self.amplitude == 0.0 {
            Waveform::Zero
        } else if self.phase == 0.0 {
            Waveform::Sinusoid { amplitude: self.amplitude, frequency: self.frequency }
        } else {
            Waveform::PhasedSinusoid { amplitude: self.amplitude, frequency: self.frequency, phase: self.phase }
        }
    }
}

/// Refine one block of a shared-carrier stage on its fixed horizon against
/// the signed target `s·e^{−iθσx/2}`, over `(A, υ, ψ)` from `(A_seed, υ_seed, 0)`.
///
/// The shared carrier has four parameters for six constraints; freeing each
/// block's frequency and phase makes the pair exactly solvable.
pub fn polish_block_sinusoid(
    target_angle: f64,
    sign: f64,
    coupling: f64,
    duration: f64,
    seed_amplitude: f64,
    seed_frequency: f64,
    config: &OptimizeConfig,
) -> Result<BlockSinusoid> {
    if !(duration > 0.0) || !seed_amplitude.is_finite() || !seed_frequency.is_finite() {
        return Err(Error::invalid("block polish needs finite seeds and T > 0"));
    }
    let s = coupling.abs().max(seed_frequency.abs()).max(1.0 / duration);
    let steps = config.steps;
    let signed = |a: f64, v: f64, psi: f64| -> f64 {
        let w = Waveform::PhasedSinusoid { amplitude: a, frequency: v, phase: psi };
        match subproblem_propagator(&w, 1.0, coupling, duration, steps) {
            Ok(u) => sign * target_overlap(&u, target_angle).re / 2.0,
            Err(_) => f64::NAN,
        }
    };
    let objective = |x: &[f64]| 1.0 - signed(x[0] * s, x[1] * s, x[2]);
    let x0 = [seed_amplitude / s, seed_frequency / s, 0.0];
    let m = nelder_mead(objective, &x0, &[0.02, 0.01, 0.05], &config.nelder_mead);
    let (amplitude, frequency, phase) = (m.x[0] * s, m.x[1] * s, m.x[2]);
    Ok(BlockSinusoid {
        amplitude,
        frequency,
        phase,
        signed_fidelity: signed(amplitude, frequency, phase),
        evaluations: m.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn closed_form_examples() {
        let p = approx_params(FRAC_PI_2, 200.0, 1).unwrap();
        assert_eq!(p.amplitude, 100.0);
        assert_eq!(p.frequency, 200.0);
        assert!((p.duration - PI / 100.0).abs() <= f64::EPSILON * p.duration);
        let p = approx_params(FRAC_PI_2, 200.0, 2).unwrap();
        assert_eq!(p.amplitude, 50.0);
        assert!((p.duration - 2.0 * PI / 100.0).abs() <= f64::EPSILON * p.duration);
        assert_eq!(approx_params(0.0, 7.0, 3).unwrap().amplitude, 0.0);
        assert!(approx_params(1.0, 0.0, 1).is_err());
        assert!(approx_params(1.0, -5.0, 1).is_err());
        assert!(approx_params(1.0, 5.0, 0).is_err());
    }

    #[test]
    fn two_qubit_program_shape() {
        let p = approx_two_qubit(FRAC_PI_2, 0.0, 200.0, 1).unwrap();
        let s = &p.stages[0];
        assert_eq!(s.omega1, Waveform::Sinusoid { amplitude: 100.0, frequency: 200.0 });
        assert_eq!(s.omega2, Waveform::Zero);
        let p = approx_two_qubit(PI, PI, 200.0, 1).unwrap();
        assert_eq!(p.stages[0].omega1, p.stages[0].omega2);
        assert_eq!(p.stages[0].omega1.eval(0.0), 200.0);
        let p = approx_two_qubit(0.0, 0.0, 3.0, 2).unwrap();
        assert!(p.stages[0].omega1.is_zero() && p.stages[0].omega2.is_zero());
    }

    #[test]
    fn optimum_seed_is_kept() {
        // J = 0 with a constant pulse (υ = 0) of area γ is exact.
        let seed = SinusoidParams { amplitude: 2.0, frequency: 0.0, harmonics: 1, duration: 0.5 };
        let r = fidelity_optimize(&seed, 1.0, 0.0, &OptimizeConfig { steps: 64, ..Default::default() }).unwrap();
        assert!(r.seed_fidelity > 1.0 - 1e-12, "{}", r.seed_fidelity);
        assert!(r.fidelity >= r.seed_fidelity);
        assert!((r.params.amplitude * r.params.duration - 1.0).abs() < 1e-6);
    }
}
