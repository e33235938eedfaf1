//! Wei–Norman analysis of the sinusoidal control in the frame rotating at `υ`
//! about y.
//!
//! With `U1 = e^{iυtσy/2} U` the rotating-frame Hamiltonian is
//! `u·σ/2`, `u = (ω cos υt, J − υ, ω sin υt)`, and writing
//! `U1 = e^{−iα1σz/2} e^{−iα2σx/2} e^{−iα3σz/2}` gives
//!
//! ```text
//! α̇1 = u3 − (u1 sin α1 − u2 cos α1)/tan α2
//! α̇2 = u1 cos α1 + u2 sin α1
//! α̇3 = (u1 sin α1 − u2 cos α1)/sin α2
//! ```
//!
//! The lab-frame propagator is `U = e^{−iυtσy/2} U1`.

use serde::{Deserialize, Serialize};

use super::{SinusoidParams, Waveform};
use crate::algebra::{propagate2, ry, Hamiltonian2, Unitary2};
use crate::decouple::{euler_zxz, zxz_compose};
use crate::error::{Error, Result};

/// Below this `|sin α2|` the coordinates are declared singular.
pub const SINGULARITY_TOL: f64 = 1e-6;

/// Sampled Wei–Norman angles; `angles[i]` holds `(α1, α2, α3)` at `times[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeiNormanAngles {
    pub times: Vec<f64>,
    pub angles: Vec<[f64; 3]>,
}

impl WeiNormanAngles {
    pub fn last(&self) -> [f64; 3] {
        *self.angles.last().expect("non-empty")
    }

    /// `U1` at the final sample.
    pub fn frame_unitary(&self) -> Unitary2 {
        let [a1, a2, a3] = self.last();
        zxz_compose(a1, a2, a3)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeiNormanPrediction {
    pub angles: WeiNormanAngles,
    /// Lab-frame `U(T)`.
    pub unitary: Unitary2,
}

/// `u·σ/2` at time `t` for the control value `omega`.
pub fn rotating_frame_hamiltonian(omega: f64, upsilon: f64, coupling: f64, t: f64) -> Hamiltonian2 {
    let (s, c) = (upsilon * t).sin_cos();
    Hamiltonian2::new(omega * c, coupling - upsilon, omega * s)
}

fn closed_form(a: f64, v: f64, coupling: f64, t: f64) -> [f64; 3] {
    let s = (v * t).sin();
    [a / (2.0 * v) * s * s, 0.5 * a * t + a / (4.0 * coupling) * (2.0 * v * t).sin(), 0.0]
}

/// Closed-form angles sampled at 1025 points and the end-time propagator.
///
/// Accurate for `υ` near `J` and `A` small against `J`; at `υT = 2nπ` the
/// prediction is `(−1)^n e^{−i(AT/2)σx/2}`.
pub fn wei_norman_predict(params: &SinusoidParams, coupling: f64) -> WeiNormanPrediction {
    const SAMPLES: usize = 1024;
    let (a, v, tt) = (params.amplitude, params.frequency, params.duration);
    let times: Vec<f64> = (0..=SAMPLES).map(|i| tt * i as f64 / SAMPLES as f64).collect();
    let angles: Vec<[f64; 3]> = if v == 0.0 {
        times.iter().map(|_| [0.0; 3]).collect()
    } else {
        times.iter().map(|&t| closed_form(a, v, coupling, t)).collect()
    };
    let angles = WeiNormanAngles { times, angles };
    let unitary = ry(v * tt) * angles.frame_unitary();
    WeiNormanPrediction { angles, unitary }
}

fn rhs(alpha: &[f64; 3], h: &Hamiltonian2) -> [f64; 3] {
    let (s1, c1) = alpha[0].sin_cos();
    let (s2, c2) = alpha[1].sin_cos();
    let cross = h.cx * s1 - h.cy * c1;
    [h.cz - cross * c2 / s2, h.cx * c1 + h.cy * s1, cross / s2]
}

/// RK4 integration of the Wei–Norman equations for an arbitrary `ω(t)`.
///
/// The coordinates are singular at `t = 0` (`α2 = 0`); integration starts at
/// `δ = 10⁻⁴ T / steps` from the angles of the exact short-time propagator,
/// on a mesh graded as `h = min(0.02 t, T/steps)`.
pub fn wei_norman_integrate(
    omega: &Waveform,
    upsilon: f64,
    coupling: f64,
    duration: f64,
    steps: usize,
) -> Result<WeiNormanAngles> {
    if steps == 0 || !(duration > 0.0) {
        return Err(Error::invalid("need steps ≥ 1 and T > 0"));
    }
    let h_max = duration / steps as f64;
    let delta = 1e-4 * h_max;
    let frame = |t: f64| rotating_frame_hamiltonian(omega.eval(t), upsilon, coupling, t);
    let u_start = propagate2(frame, delta, 64)?;
    let (a1, a2, a3) = euler_zxz(&u_start);
    if a2.sin().abs() < SINGULARITY_TOL * 1e-6 {
        return Err(Error::Singularity { time: delta, value: a2.sin().abs() });
    }
    let mut alpha = [a1, a2, a3];
    // The check arms once α2 has left the neighbourhood of the start.
    let mut armed = a2.sin().abs() >= SINGULARITY_TOL;
    let mut t = delta;
    let mut times = vec![0.0, delta];
    let mut angles = vec![[0.0; 3], alpha];
    let add = |a: &[f64; 3], k: &[f64; 3], h: f64| [a[0] + h * k[0], a[1] + h * k[1], a[2] + h * k[2]];
    while t < duration {
        let h = (0.02 * t).min(h_max).min(duration - t);
        let k1 = rhs(&alpha, &frame(t));
        let k2 = rhs(&add(&alpha, &k1, 0.5 * h), &frame(t + 0.5 * h));
        let k3 = rhs(&add(&alpha, &k2, 0.5 * h), &frame(t + 0.5 * h));
        let k4 = rhs(&add(&alpha, &k3, h), &frame(t + h));
        for i in 0..3 {
            alpha[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t = if duration - t - h <= 1e-15 * duration { duration } else { t + h };
        let s = alpha[1].sin().abs();
        if s.is_nan() || (armed && s < SINGULARITY_TOL) {
            return Err(Error::Singularity { time: t, value: s });
        }
        armed |= s >= SINGULARITY_TOL;
        times.push(t);
        angles.push(alpha);
    }
    Ok(WeiNormanAngles { times, angles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gate_fidelity;
    use crate::synth::{approx_params, subproblem_propagator};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_amplitude_gives_zero_angles() {
        let p = SinusoidParams { amplitude: 0.0, frequency: 200.0, harmonics: 1, duration: 0.03 };
        let pred = wei_norman_predict(&p, 200.0);
        assert!(pred.angles.angles.iter().all(|a| a[0] == 0.0 && a[1] == 0.0));
        let w = Waveform::Zero;
        assert!(matches!(wei_norman_integrate(&w, 200.0, 200.0, 0.03, 100), Err(Error::Singularity { .. })));
    }

    #[test]
    fn resonant_prediction_is_x_rotation() {
        for n in 1..=3 {
            let p = approx_params(1.1, 200.0, n).unwrap();
            let pred = wei_norman_predict(&p, 200.0);
            let expected = crate::algebra::rx(p.amplitude * p.duration / 2.0);
            assert!(gate_fidelity(&pred.unitary, &expected) > 1.0 - 1e-12);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!(pred.unitary.distance(&Unitary2::new(expected.matrix().scale_real(sign)).unwrap()) < 1e-9);
        }
    }

    #[test]
    fn frame_ode_reconstructs_rotating_propagator() {
        let p = approx_params(FRAC_PI_2, 200.0, 1).unwrap();
        let w = p.waveform();
        let traj = wei_norman_integrate(&w, p.frequency, 200.0, p.duration, 4096).unwrap();
        let direct = propagate2(
            |t| rotating_frame_hamiltonian(w.eval(t), p.frequency, 200.0, t),
            p.duration,
            1 << 15,
        )
        .unwrap();
        assert!(gate_fidelity(&traj.frame_unitary(), &direct) >= 1.0 - 1e-6);
        // Lab frame.
        let lab = ry(p.frequency * p.duration) * traj.frame_unitary();
        let sim = subproblem_propagator(&w, 1.0, 200.0, p.duration, 1 << 15).unwrap();
        assert!(gate_fidelity(&lab, &sim) >= 1.0 - 1e-6);
        // α2(T) against the closed form.
        let closed = closed_form(p.amplitude, p.frequency, 200.0, p.duration)[1];
        let got = traj.last()[1];
        assert!((got - closed).abs() <= 0.02 * closed.abs(), "{got} vs {closed}");
    }

    #[test]
    fn off_resonant_reconstruction() {
        let w = Waveform::Sinusoid { amplitude: 98.062, frequency: 196.9 };
        let traj = wei_norman_integrate(&w, 196.9, 200.0, 0.031911, 4096).unwrap();
        let direct = propagate2(|t| rotating_frame_hamiltonian(w.eval(t), 196.9, 200.0, t), 0.031911, 1 << 15).unwrap();
        assert!(gate_fidelity(&traj.frame_unitary(), &direct) >= 1.0 - 1e-6);
    }
}
