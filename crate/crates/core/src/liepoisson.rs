//! Reduced costate dynamics for `i U' = (ω σx/2 + J σy/2) U` on SU(2).
//!
//! With `p_k = ⟨M, i U†σ_k U⟩/2` for a constant `M`, the costate obeys
//! `ṗ = (ω, J, 0) × p`:
//!
//! ```text
//! ṗ1 = J p3,   ṗ2 = −ω p3,   ṗ3 = ω p2 − J p1
//! ```
//!
//! `C1 = |p|²` is conserved for any control. `C2 = p1² + 2J p2` has
//! `Ċ2 = 2J p3 (p1 − ω)` and is therefore conserved only along the
//! minimum-energy extremals `ω = p1`.

use serde::{Deserialize, Serialize};

use crate::algebra::{pauli, Matrix2, Unitary2, C64};
use crate::error::{Error, Result};

/// Default RK4 step count for [`integrate_costate`].
pub const DEFAULT_COSTATE_STEPS: usize = 20_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Costate {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl Costate {
    pub const fn new(p1: f64, p2: f64, p3: f64) -> Self {
        Costate { p1, p2, p3 }
    }

    pub fn c1(&self) -> f64 {
        self.p1 * self.p1 + self.p2 * self.p2 + self.p3 * self.p3
    }

    pub fn c2(&self, coupling: f64) -> f64 {
        self.p1 * self.p1 + 2.0 * coupling * self.p2
    }

    pub fn is_finite(&self) -> bool {
        self.p1.is_finite() && self.p2.is_finite() && self.p3.is_finite()
    }

    fn axpy(&self, h: f64, d: &Costate) -> Costate {
        Costate::new(self.p1 + h * d.p1, self.p2 + h * d.p2, self.p3 + h * d.p3)
    }

    /// The constant `M = i p·σ` that reproduces this costate at `U = I`.
    pub fn pairing_matrix(&self) -> Matrix2 {
        (pauli::X.scale_real(self.p1) + pauli::Y.scale_real(self.p2) + pauli::Z.scale_real(self.p3))
            .scale(C64::new(0.0, 1.0))
    }

    /// `p_k = ⟨M, i U†σ_k U⟩/2` with `⟨X, Y⟩ = Tr(X Y†)`.
    pub fn from_pairing(m: &Matrix2, u: &Unitary2) -> Costate {
        let i = C64::new(0.0, 1.0);
        let p = |s: &Matrix2| {
            let y = (*u.adjoint().matrix() * *s * *u.matrix()).scale(i);
            0.5 * (*m * y.adjoint()).trace().re
        };
        Costate::new(p(&pauli::X), p(&pauli::Y), p(&pauli::Z))
    }
}

pub fn costate_rhs(p: &Costate, omega: f64, coupling: f64) -> Costate {
    Costate::new(coupling * p.p3, -omega * p.p3, omega * p.p2 - coupling * p.p1)
}

/// Fixed-step costate trajectory, `states[i]` at `times[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostateTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Costate>,
}

impl CostateTrajectory {
    pub fn last(&self) -> &Costate {
        self.states.last().expect("trajectory has at least the initial state")
    }

    /// Largest relative deviation of `C1` and `C2` from their initial values.
    pub fn invariant_drift(&self, coupling: f64) -> (f64, f64) {
        let p0 = self.states[0];
        let rel = |a: f64, b: f64, scale: f64| (a - b).abs() / scale.max(f64::MIN_POSITIVE);
        let c1_scale = p0.c1();
        let c2_scale = p0.p1 * p0.p1 + 2.0 * (coupling * p0.p2).abs();
        self.states.iter().fold((0.0f64, 0.0f64), |(d1, d2), p| {
            (
                d1.max(rel(p.c1(), p0.c1(), c1_scale)),
                d2.max(rel(p.c2(coupling), p0.c2(coupling), c2_scale)),
            )
        })
    }
}

/// RK4 integration of the costate under a feedback law `ω = law(t, p)`.
///
/// An open-loop control is the special case `|t, _| ω(t)`.
pub fn integrate_costate_with(
    p0: Costate,
    law: impl Fn(f64, &Costate) -> f64,
    coupling: f64,
    duration: f64,
    steps: usize,
) -> Result<CostateTrajectory> {
    if steps == 0 {
        return Err(Error::invalid("steps must be ≥ 1"));
    }
    if !(duration >= 0.0) || !duration.is_finite() || !coupling.is_finite() {
        return Err(Error::invalid("duration and coupling must be finite, duration ≥ 0"));
    }
    let h = duration / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut p = p0;
    times.push(0.0);
    states.push(p);
    let f = |t: f64, p: &Costate| costate_rhs(p, law(t, p), coupling);
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = f(t, &p);
        let k2 = f(t + 0.5 * h, &p.axpy(0.5 * h, &k1));
        let k3 = f(t + 0.5 * h, &p.axpy(0.5 * h, &k2));
        let k4 = f(t + h, &p.axpy(h, &k3));
        p = Costate::new(
            p.p1 + h / 6.0 * (k1.p1 + 2.0 * k2.p1 + 2.0 * k3.p1 + k4.p1),
            p.p2 + h / 6.0 * (k1.p2 + 2.0 * k2.p2 + 2.0 * k3.p2 + k4.p2),
            p.p3 + h / 6.0 * (k1.p3 + 2.0 * k2.p3 + 2.0 * k3.p3 + k4.p3),
        );
        if !p.is_finite() {
            return Err(Error::IntegrationFailure {
                time: t + h,
                detail: format!("non-finite costate {p:?}"),
            });
        }
        times.push(t + h);
        states.push(p);
    }
    Ok(CostateTrajectory { times, states })
}

/// Open-loop costate integration for a prescribed `ω(t)`.
pub fn integrate_costate(
    p0: Costate,
    omega: impl Fn(f64) -> f64,
    coupling: f64,
    duration: f64,
    steps: usize,
) -> Result<CostateTrajectory> {
    integrate_costate_with(p0, |t, _| omega(t), coupling, duration, steps)
}

/// Pointwise minimizer of `ω p1` over `[ω_min, ω_max]`; the tie `p1 = 0`
/// goes to `ω_min`.
pub fn bangbang_law(p1: f64, omega_min: f64, omega_max: f64) -> f64 {
    debug_assert!(omega_min < omega_max);
    if p1 >= 0.0 {
        omega_min
    } else {
        omega_max
    }
}

/// Minimum-energy extremal law `ω = p1`.
pub fn min_energy_law(_t: f64, p: &Costate) -> f64 {
    p.p1
}

/// Joint RK4 integration of `(U, p)` under a feedback law; returns `U(T)`,
/// the costate trajectory and the control samples at the step starts.
pub fn integrate_coupled(
    p0: Costate,
    law: impl Fn(f64, &Costate) -> f64,
    coupling: f64,
    duration: f64,
    steps: usize,
) -> Result<(Unitary2, CostateTrajectory)> {
    if steps == 0 {
        return Err(Error::invalid("steps must be ≥ 1"));
    }
    let h = duration / steps as f64;
    let i = C64::new(0.0, 1.0);
    let generator = |omega: f64| -> Matrix2 {
        (pauli::X.scale_real(0.5 * omega) + pauli::Y.scale_real(0.5 * coupling)).scale(-i)
    };
    let mut u = Matrix2::identity();
    let mut p = p0;
    let mut times = vec![0.0];
    let mut states = vec![p];
    for k in 0..steps {
        let t = k as f64 * h;
        let w1 = law(t, &p);
        let d1 = costate_rhs(&p, w1, coupling);
        let u1 = generator(w1) * u;
        let p2 = p.axpy(0.5 * h, &d1);
        let w2 = law(t + 0.5 * h, &p2);
        let d2 = costate_rhs(&p2, w2, coupling);
        let u2 = generator(w2) * (u + u1.scale_real(0.5 * h));
        let p3 = p.axpy(0.5 * h, &d2);
        let w3 = law(t + 0.5 * h, &p3);
        let d3 = costate_rhs(&p3, w3, coupling);
        let u3 = generator(w3) * (u + u2.scale_real(0.5 * h));
        let p4 = p.axpy(h, &d3);
        let w4 = law(t + h, &p4);
        let d4 = costate_rhs(&p4, w4, coupling);
        let u4 = generator(w4) * (u + u3.scale_real(h));
        u = u + (u1 + u2.scale_real(2.0) + u3.scale_real(2.0) + u4).scale_real(h / 6.0);
        p = Costate::new(
            p.p1 + h / 6.0 * (d1.p1 + 2.0 * d2.p1 + 2.0 * d3.p1 + d4.p1),
            p.p2 + h / 6.0 * (d1.p2 + 2.0 * d2.p2 + 2.0 * d3.p2 + d4.p2),
            p.p3 + h / 6.0 * (d1.p3 + 2.0 * d2.p3 + 2.0 * d3.p3 + d4.p3),
        );
        if !p.is_finite() || !u.is_finite() {
            return Err(Error::IntegrationFailure {
                time: t + h,
                detail: "non-finite coupled state".into(),
            });
        }
        times.push(t + h);
        states.push(p);
    }
    // RK4 leaves an O(h⁴) unitarity defect; project back.
    let u = crate::algebra::linalg::polar_unitary(&u).ok_or_else(|| Error::IntegrationFailure {
        time: duration,
        detail: "propagator became singular".into(),
    })?;
    Ok((u, CostateTrajectory { times, states }))
}
