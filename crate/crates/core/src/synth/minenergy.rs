//! Minimum-energy control `ω = p1`.
//!
//! Along these extremals `p1` obeys `p̈1 = (C2/2 − J²) p1 − p1³/2`, solved by
//! `ω(t) = 2bk cn(bt + f, k)` with `C2/2 − J² = b²(2k² − 1)`. For `J = 0` the
//! extremals are constants, which the cn family with `k < 1` cannot reach;
//! that case is returned as [`MinEnergyControl::Constant`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{subproblem_propagator, target_overlap, waveform_energy, OptimizeConfig, SinusoidParams, Waveform};
use crate::elliptic::{jacobi_sn_cn_dn, quarter_period, EllipticModulus};
use crate::error::{Error, Result};
use crate::liepoisson::Costate;
use crate::optimize::nelder_mead;

/// Fidelity below which the search is reported as a failure.
pub const MIN_ENERGY_FAILURE: f64 = 1.0 - 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipticParams {
    pub b: f64,
    pub f: f64,
    pub k: EllipticModulus,
    pub duration: f64,
}

impl EllipticParams {
    /// Canonical form of `2 b κ cn(bt + f, |κ|)` for signed `b`, `κ`:
    /// `b ≥ 0`, `k ≥ 0`, `f ∈ [0, 4K)`.
    pub fn from_signed(b: f64, f: f64, kappa: f64, duration: f64) -> Result<Self> {
        let k = EllipticModulus::new(kappa.abs())?;
        let (mut b, mut f, mut kappa) = (b, f, kappa);
        if b < 0.0 {
            // cn is even: 2bκ cn(bt + f) = 2|b|(−κ) cn(|b|t − f).
            b = -b;
            f = -f;
            kappa = -kappa;
        }
        let kk = quarter_period(k);
        if kappa < 0.0 {
            f += 2.0 * kk;
        }
        Ok(EllipticParams { b, f: f.rem_euclid(4.0 * kk), k, duration })
    }

    pub fn amplitude(&self) -> f64 {
        2.0 * self.b * self.k.value()
    }

    /// `C2/2 − J² = b²(2k² − 1)`.
    pub fn lambda(&self) -> f64 {
        self.b * self.b * (2.0 * self.k.value().powi(2) - 1.0)
    }

    pub fn waveform(&self) -> Waveform {
        Waveform::Elliptic { b: self.b, f: self.f, k: self.k }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum MinEnergyControl {
    Elliptic(EllipticParams),
    Constant { omega: f64, duration: f64 },
}

impl MinEnergyControl {
    pub fn waveform(&self) -> Waveform {
        match self {
            MinEnergyControl::Elliptic(p) => p.waveform(),
            MinEnergyControl::Constant { omega, .. } => {
                Waveform::PiecewiseConstant { levels: vec![*omega], switch_times: vec![] }
            }
        }
    }

    pub fn duration(&self) -> f64 {
        match self {
            MinEnergyControl::Elliptic(p) => p.duration,
            MinEnergyControl::Constant { duration, .. } => *duration,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinEnergySolution {
    pub control: MinEnergyControl,
    pub fidelity: f64,
    /// `½∫ω² dt`.
    pub energy: f64,
    /// SU(2) sign `s` with `U ≈ s·e^{−iθσx/2}`.
    pub sign: f64,
    pub evaluations: usize,
}

/// Initial costate of the extremal through `ω = 2bk cn(bt + f, k)`:
/// `p1 = ω`, `p3 = ω̇/J`, `p2 = (λ + J² − p1²/2)/J`.
pub fn elliptic_initial_costate(params: &EllipticParams, coupling: f64) -> Result<Costate> {
    if coupling == 0.0 {
        return Err(Error::invalid("the elliptic extremal needs J ≠ 0"));
    }
    let (b, k) = (params.b, params.k.value());
    let (sn, cn, dn) = jacobi_sn_cn_dn(params.f, params.k);
    let p1 = 2.0 * b * k * cn;
    let p1_dot = -2.0 * b * b * k * sn * dn;
    let p2 = (params.lambda() + coupling * coupling - 0.5 * p1 * p1) / coupling;
    Ok(Costate::new(p1, p2, p1_dot / coupling))
}

/// Minimum-energy control for `e^{−iθσx/2}` (phase-invariant) on a fixed
/// horizon, seeded from a sinusoid `(A, υ, T)` as `b = υ`, `k = A/(2υ)`, `f = 0`.
pub fn min_energy_synthesize(
    target_angle: f64,
    coupling: f64,
    duration: f64,
    seed: &SinusoidParams,
    config: &OptimizeConfig,
) -> Result<MinEnergySolution> {
    min_energy_with_sign(target_angle, None, coupling, duration, seed, config)
}

/// As [`min_energy_synthesize`]; with `Some(s)` the target is `s·e^{−iθσx/2}`.
pub(crate) fn min_energy_with_sign(
    target_angle: f64,
    sign: Option<f64>,
    coupling: f64,
    duration: f64,
    seed: &SinusoidParams,
    config: &OptimizeConfig,
) -> Result<MinEnergySolution> {
    if !(duration > 0.0) || !duration.is_finite() || !target_angle.is_finite() {
        return Err(Error::invalid("need a finite target and T > 0"));
    }
    if coupling == 0.0 {
        return Ok(constant_solution(target_angle, sign, duration));
    }
    let steps = config.steps;
    let score = |b: f64, f: f64, kappa: f64| -> Option<(f64, f64)> {
        if !(kappa.abs() < 1.0) {
            return None;
        }
        let k = EllipticModulus::new(kappa.abs()).ok()?;
        // 2bκ cn(bt + f, |κ|): the sign of κ flips the waveform.
        let w = Waveform::Linear { terms: vec![(kappa.signum(), Waveform::Elliptic { b, f, k })] };
        let u = subproblem_propagator(&w, 1.0, coupling, duration, steps).ok()?;
        let z = target_overlap(&u, target_angle);
        let fid = match sign {
            Some(s) => s * z.re / 2.0,
            None => z.norm() / 2.0,
        };
        Some((fid, z.re))
    };
    let s = seed.frequency.abs().max(coupling.abs());
    let x0 = [seed.frequency / s, 0.0, seed.amplitude / (2.0 * seed.frequency)];
    if !x0.iter().all(|v| v.is_finite()) {
        return Err(Error::invalid("seed frequency must be nonzero"));
    }
    let objective = |x: &[f64]| score(x[0] * s, x[1], x[2]).map_or(f64::NAN, |(fid, _)| 1.0 - fid);
    let m = nelder_mead(objective, &x0, &[0.02, 0.1, 0.05], &config.nelder_mead);
    let (b, f, kappa) = (m.x[0] * s, m.x[1], m.x[2]);
    let (fidelity, re) = score(b, f, kappa).unwrap_or((0.0, 0.0));
    let fidelity = fidelity.clamp(0.0, 1.0);
    log::debug!("min-energy search: b = {b}, f = {f}, k = {kappa}, fidelity = {fidelity}");
    if !(fidelity >= MIN_ENERGY_FAILURE) {
        return Err(Error::SynthesisFailure {
            reason: format!("minimum-energy search for θ = {target_angle} on T = {duration} s did not converge"),
            best_fidelity: fidelity,
        });
    }
    let params = EllipticParams::from_signed(b, f, kappa, duration)?;
    let energy = waveform_energy(&params.waveform(), duration, steps);
    Ok(MinEnergySolution {
        control: MinEnergyControl::Elliptic(params),
        fidelity,
        energy,
        sign: sign.unwrap_or(if re >= 0.0 { 1.0 } else { -1.0 }),
        evaluations: m.evaluations,
    })
}

/// `J = 0`: the extremal is the constant of smallest magnitude reaching the target.
fn constant_solution(theta: f64, sign: Option<f64>, duration: f64) -> MinEnergySolution {
    // rx(θ + 2π) = −rx(θ); candidates differ by 2π and carry alternating signs.
    let base = theta.rem_euclid(4.0 * PI);
    let candidates = [base - 4.0 * PI, base - 2.0 * PI, base, base + 2.0 * PI];
    let sign_of = |c: f64| if ((c - theta) / (2.0 * PI)).round().rem_euclid(2.0) == 0.0 { 1.0 } else { -1.0 };
    let angle = candidates
        .into_iter()
        .filter(|&c| sign.is_none_or(|s| sign_of(c) == s))
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .expect("candidates cover both signs");
    let omega = angle / duration;
    MinEnergySolution {
        control: MinEnergyControl::Constant { omega, duration },
        fidelity: 1.0,
        energy: 0.5 * omega * omega * duration,
        sign: sign_of(angle),
        evaluations: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::jacobi_cn;

    #[test]
    fn canonical_form_preserves_waveform() {
        for &(b, f, kap) in &[(200.0, 0.1, 0.3), (-150.0, 0.4, 0.2), (120.0, -0.3, -0.5), (-90.0, 1.0, -0.7)] {
            let p = EllipticParams::from_signed(b, f, kap, 1.0).unwrap();
            assert!(p.b >= 0.0 && p.k.value() >= 0.0);
            let km = EllipticModulus::new(f64::abs(kap)).unwrap();
            for i in 0..20 {
                let t = i as f64 * 0.003;
                let raw = 2.0 * b * kap * jacobi_cn(b * t + f, km);
                assert!((p.waveform().eval(t) - raw).abs() < 1e-9 * raw.abs().max(1.0), "{b} {f} {kap}");
            }
        }
    }

    #[test]
    fn zero_coupling_returns_constant_with_cauchy_schwarz_energy() {
        let (theta, t) = (1.3, 0.02);
        let sol = min_energy_synthesize(theta, 0.0, t, &SinusoidParams { amplitude: 1.0, frequency: 1.0, harmonics: 1, duration: t }, &OptimizeConfig::default()).unwrap();
        let bound = theta * theta / (2.0 * t);
        assert!((sol.energy - bound).abs() <= 1e-6 * bound);
        assert_eq!(sol.fidelity, 1.0);
        // The long way round is never chosen.
        let sol = min_energy_synthesize(5.0, 0.0, t, &SinusoidParams { amplitude: 1.0, frequency: 1.0, harmonics: 1, duration: t }, &OptimizeConfig::default()).unwrap();
        assert!(matches!(sol.control, MinEnergyControl::Constant { omega, .. } if (omega * t - (5.0 - 2.0 * PI)).abs() < 1e-12));
        assert_eq!(sol.sign, -1.0);
    }

    #[test]
    fn costate_of_elliptic_extremal() {
        let p = EllipticParams::from_signed(200.07, -0.0014, 0.246, 0.031911).unwrap();
        let j = 200.0;
        let c = elliptic_initial_costate(&p, j).unwrap();
        assert!((c.p1 - p.waveform().eval(0.0)).abs() < 1e-9);
        // C2 = p1² + 2J p2 = 2(λ + J²).
        assert!((c.c2(j) - 2.0 * (p.lambda() + j * j)).abs() < 1e-6 * j * j);
    }
}
