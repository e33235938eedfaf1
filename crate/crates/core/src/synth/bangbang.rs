//! Time-optimal control with `ω ∈ [ω_min, ω_max]`.
//!
//! The control Hamiltonian is minimized pointwise by `ω_min` where `p1 ≥ 0`
//! and `ω_max` where `p1 < 0`. Between switches `ω` is constant, so both the
//! costate (a rigid rotation about `(ω, J, 0)`) and `U` evolve in closed form,
//! and the next zero of `p1` is found analytically. Since `ṗ1 = J p3` does
//! not depend on `ω`, zeros of `p1` are crossed transversally whenever
//! `p3 ≠ 0`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{normalize_angle, target_overlap, Waveform};
use crate::algebra::{Hamiltonian2, Unitary2};
use crate::error::{Error, Result};
use crate::liepoisson::{bangbang_law, Costate};
use crate::optimize::{nelder_mead, NelderMeadConfig};

/// Infidelity accepted for a bang-bang solution.
pub const BANGBANG_TOL: f64 = 1e-6;
const MAX_SEGMENTS: usize = 4096;
/// Sampled infidelity below which a local minimum is worth polishing.
const CANDIDATE_CUTOFF: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    Min,
    Max,
}

impl Level {
    fn other(self) -> Level {
        match self {
            Level::Min => Level::Max,
            Level::Max => Level::Min,
        }
    }
}

/// Two-level control; the level alternates at each switch time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BangBangSchedule {
    pub omega_min: f64,
    pub omega_max: f64,
    pub switch_times: Vec<f64>,
    pub initial_level: Level,
    pub duration: f64,
}

impl BangBangSchedule {
    pub fn new(
        omega_min: f64,
        omega_max: f64,
        switch_times: Vec<f64>,
        initial_level: Level,
        duration: f64,
    ) -> Result<Self> {
        if !(omega_min < omega_max) || !omega_min.is_finite() || !omega_max.is_finite() {
            return Err(Error::invalid("need finite bounds with ω_min < ω_max"));
        }
        if !(duration >= 0.0) || !duration.is_finite() {
            return Err(Error::invalid("duration must be finite and ≥ 0"));
        }
        let increasing = switch_times.windows(2).all(|w| w[0] < w[1]);
        let inside = switch_times.iter().all(|&s| s > 0.0 && s < duration);
        if !increasing || !inside {
            return Err(Error::invalid("switch times must be strictly increasing inside (0, T)"));
        }
        Ok(BangBangSchedule { omega_min, omega_max, switch_times, initial_level, duration })
    }

    pub fn value(&self, level: Level) -> f64 {
        match level {
            Level::Min => self.omega_min,
            Level::Max => self.omega_max,
        }
    }

    /// Control value of each segment.
    pub fn levels(&self) -> Vec<f64> {
        let mut level = self.initial_level;
        let mut out = Vec::with_capacity(self.switch_times.len() + 1);
        for _ in 0..=self.switch_times.len() {
            out.push(self.value(level));
            level = level.other();
        }
        out
    }

    pub fn segments(&self) -> Vec<(f64, f64)> {
        let mut edges = vec![0.0];
        edges.extend(&self.switch_times);
        edges.push(self.duration);
        self.levels().into_iter().zip(edges.windows(2).map(|w| w[1] - w[0])).collect()
    }

    pub fn waveform(&self) -> Waveform {
        Waveform::PiecewiseConstant { levels: self.levels(), switch_times: self.switch_times.clone() }
    }

    /// Exact propagator for drift `+J σy/2`.
    pub fn propagator(&self, coupling: f64) -> Unitary2 {
        self.segments()
            .into_iter()
            .fold(Unitary2::identity(), |u, (w, d)| Hamiltonian2::new(w, coupling, 0.0).evolve(d) * u)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BangBangMethod {
    /// No drift: a single segment.
    Analytic,
    CostateShooting,
    DirectSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BangBangSolution {
    pub schedule: BangBangSchedule,
    /// Initial costate generating the schedule through the switching law, when
    /// the schedule is an extremal.
    pub costate: Option<Costate>,
    pub fidelity: f64,
    /// SU(2) sign `s` with `U ≈ s·e^{−iθσx/2}`.
    pub sign: f64,
    pub method: BangBangMethod,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BangBangConfig {
    /// Polar rows of the shooting direction grid (`2×` as many azimuths).
    pub grid: usize,
    /// Time samples per extremal in the shooting scan.
    pub samples: usize,
    /// Shooting candidates polished at most.
    pub polish: usize,
    /// Random starts of the direct search, shared across switch structures.
    pub starts: usize,
    /// Switch cap of the direct search.
    pub max_switches: usize,
    pub nelder_mead: NelderMeadConfig,
}

impl Default for BangBangConfig {
    fn default() -> Self {
        BangBangConfig {
            grid: 24,
            samples: 400,
            polish: 24,
            starts: 64,
            max_switches: 4,
            nelder_mead: NelderMeadConfig { max_evaluations: 600, restarts: 1, ..NelderMeadConfig::default() },
        }
    }
}

fn rotate(p: &Costate, n: [f64; 3], angle: f64) -> Costate {
    let (s, c) = angle.sin_cos();
    let v = [p.p1, p.p2, p.p3];
    let dot = n[0] * v[0] + n[1] * v[1] + n[2] * v[2];
    let cross = [n[1] * v[2] - n[2] * v[1], n[2] * v[0] - n[0] * v[2], n[0] * v[1] - n[1] * v[0]];
    let r = |i: usize| v[i] * c + cross[i] * s + n[i] * dot * (1.0 - c);
    Costate::new(r(0), r(1), r(2))
}

/// First `τ > 0` with `p1(τ) = 0` under rotation about unit `n` at `rate`.
fn next_zero(p: &Costate, n: [f64; 3], rate: f64) -> Option<f64> {
    let dot = n[0] * p.p1 + n[1] * p.p2 + n[2] * p.p3;
    let c0 = n[0] * dot;
    let c1 = p.p1 - c0;
    let c2 = n[1] * p.p3 - n[2] * p.p2;
    let amp = c1.hypot(c2);
    if amp <= c0.abs() * (1.0 + 1e-12) {
        return None;
    }
    let delta = c2.atan2(c1);
    let phi = (-c0 / amp).acos();
    let eta = 1e-9;
    [delta + phi, delta - phi]
        .into_iter()
        .map(|x| {
            let x = x.rem_euclid(2.0 * PI);
            if x < eta {
                x + 2.0 * PI
            } else {
                x
            }
        })
        .min_by(f64::total_cmp)
        .map(|x| x / rate)
}

/// Follow the switching law from `p0` for `T`; `None` if the number of
/// segments explodes.
pub fn shoot_bangbang(
    p0: Costate,
    coupling: f64,
    bounds: (f64, f64),
    duration: f64,
) -> Option<(Unitary2, BangBangSchedule)> {
    let (lo, hi) = bounds;
    let value = |l: Level| if l == Level::Min { lo } else { hi };
    let initial = if p0.p1 == 0.0 {
        // Decided by the side p1 moves to.
        if coupling * p0.p3 > 0.0 || p0.p3 == 0.0 { Level::Min } else { Level::Max }
    } else if bangbang_law(p0.p1, lo, hi) == lo {
        Level::Min
    } else {
        Level::Max
    };
    let mut level = initial;
    let mut p = p0;
    let mut u = Unitary2::identity();
    let mut t = 0.0;
    let mut switches = Vec::new();
    while t < duration {
        if switches.len() > MAX_SEGMENTS {
            return None;
        }
        let w = value(level);
        let rate = w.hypot(coupling);
        let n = if rate > 0.0 { [w / rate, coupling / rate, 0.0] } else { [0.0; 3] };
        let tau = if rate > 0.0 { next_zero(&p, n, rate) } else { None };
        let end = match tau {
            Some(tau) if t + tau < duration => t + tau,
            _ => duration,
        };
        let d = end - t;
        u = Hamiltonian2::new(w, coupling, 0.0).evolve(d) * u;
        p = rotate(&p, n, rate * d);
        t = end;
        if t < duration {
            p.p1 = 0.0;
            let next = if coupling * p.p3 > 0.0 { Level::Min } else { Level::Max };
            if next != level {
                switches.push(t);
                level = next;
            }
        }
    }
    let schedule = BangBangSchedule { omega_min: lo, omega_max: hi, switch_times: switches, initial_level: initial, duration };
    Some((u, schedule))
}

fn unit_vector(theta: f64, phi: f64) -> Costate {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Costate::new(st * cp, st * sp, ct)
}

fn check_bounds(bounds: (f64, f64)) -> Result<()> {
    if !(bounds.0 < bounds.1) || !bounds.0.is_finite() || !bounds.1.is_finite() {
        return Err(Error::invalid(format!("need finite bounds with ω_min < ω_max, got {bounds:?}")));
    }
    Ok(())
}

/// Characteristic time `2π / √(max|ω|² + J²)` used to scale searches.
fn time_scale(coupling: f64, bounds: (f64, f64)) -> f64 {
    2.0 * PI / bounds.0.abs().max(bounds.1.abs()).hypot(coupling)
}

/// Time-optimal bang-bang control for `e^{−iθσx/2}` (phase-invariant).
///
/// Multi-start shooting over the initial costate direction and `T`; among
/// extremals reaching the target the shortest is returned. Falls back to
/// the direct search when shooting finds nothing.
pub fn bangbang_synthesize(
    target_angle: f64,
    coupling: f64,
    omega_min: f64,
    omega_max: f64,
    config: &BangBangConfig,
) -> Result<BangBangSolution> {
    check_bounds((omega_min, omega_max))?;
    if !target_angle.is_finite() || !coupling.is_finite() {
        return Err(Error::invalid("target and coupling must be finite"));
    }
    let theta = normalize_angle(target_angle);
    if theta == 0.0 {
        return Ok(BangBangSolution {
            schedule: BangBangSchedule::new(omega_min, omega_max, vec![], Level::Max, 0.0)?,
            costate: None,
            fidelity: 1.0,
            sign: 1.0,
            method: BangBangMethod::Analytic,
        });
    }
    if coupling == 0.0 {
        return analytic_driftless(theta, omega_min, omega_max);
    }
    let bounds = (omega_min, omega_max);
    match shooting(theta, coupling, bounds, config) {
        Some(sol) => Ok(sol),
        None => {
            log::info!("bang-bang shooting found no extremal; falling back to direct search");
            bangbang_direct_search(theta, coupling, bounds, config)
        }
    }
}

fn analytic_driftless(theta: f64, lo: f64, hi: f64) -> Result<BangBangSolution> {
    // rx(θ) ≃ rx(θ − 2π): reach it forwards with ω_max or backwards with ω_min.
    let forward = if hi > 0.0 { theta / hi } else { f64::INFINITY };
    let backward = if lo < 0.0 { (2.0 * PI - theta) / -lo } else { f64::INFINITY };
    let (level, duration) = if forward <= backward { (Level::Max, forward) } else { (Level::Min, backward) };
    if !duration.is_finite() {
        return Err(Error::SynthesisFailure { reason: "bounds exclude every rotation direction".into(), best_fidelity: 0.0 });
    }
    let schedule = BangBangSchedule::new(lo, hi, vec![], level, duration)?;
    let z = target_overlap(&schedule.propagator(0.0), theta);
    let costate = Some(Costate::new(if level == Level::Max { -1.0 } else { 1.0 }, 0.0, 0.0));
    Ok(BangBangSolution {
        schedule,
        costate,
        fidelity: (z.norm() / 2.0).min(1.0),
        sign: z.re.signum(),
        method: BangBangMethod::Analytic,
    })
}

/// Infidelity against `rx(θ)` along the extremal at each of `times`
/// (ascending, within the schedule's duration).
fn sampled_infidelity(schedule: &BangBangSchedule, coupling: f64, theta: f64, times: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut u = Unitary2::identity();
    let mut start = 0.0;
    let mut segs = schedule.segments().into_iter();
    let mut current = segs.next();
    for &t in times {
        while let Some((w, d)) = current {
            if t <= start + d {
                break;
            }
            u = Hamiltonian2::new(w, coupling, 0.0).evolve(d) * u;
            start += d;
            current = segs.next();
        }
        let w = current.map_or(0.0, |(w, _)| w);
        let v = Hamiltonian2::new(w, coupling, 0.0).evolve(t - start) * u;
        out.push(1.0 - target_overlap(&v, theta).norm() / 2.0);
    }
    out
}

/// Costate shooting. A grid of initial directions is followed for
/// `2.5 × time_scale`; local minima of the infidelity along each extremal
/// are polished over `(direction, T)` in order of increasing `T`, and the
/// shortest polished extremal wins.
fn shooting(theta: f64, coupling: f64, bounds: (f64, f64), config: &BangBangConfig) -> Option<BangBangSolution> {
    let scale = time_scale(coupling, bounds);
    let horizon = 2.5 * scale;
    let samples = config.samples.max(8);
    let times: Vec<f64> = (1..=samples).map(|i| horizon * i as f64 / samples as f64).collect();
    let rows = config.grid.max(2);
    let mut candidates = Vec::new();
    for i in 0..rows {
        let polar = PI * (i as f64 + 0.5) / rows as f64;
        for k in 0..2 * rows {
            let azimuth = PI * k as f64 / rows as f64;
            let Some((_, schedule)) = shoot_bangbang(unit_vector(polar, azimuth), coupling, bounds, horizon) else {
                continue;
            };
            let f = sampled_infidelity(&schedule, coupling, theta, &times);
            for m in 1..f.len() - 1 {
                if f[m] <= f[m - 1] && f[m] <= f[m + 1] && f[m] < CANDIDATE_CUTOFF {
                    candidates.push((times[m], polar, azimuth));
                }
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let objective = |x: &[f64]| {
        let t = x[2] * scale;
        if !(t > 0.0) {
            return f64::NAN;
        }
        match shoot_bangbang(unit_vector(x[0], x[1]), coupling, bounds, t) {
            Some((u, _)) => 1.0 - target_overlap(&u, theta).norm() / 2.0,
            None => f64::NAN,
        }
    };
    let dt = horizon / samples as f64 / scale;
    let span = PI / rows as f64;
    let mut best: Option<(f64, Costate)> = None;
    let mut polished = 0;
    // Horizons whose basin already failed to polish; nearby candidates
    // almost always fall into the same spurious minimum.
    let mut failed: Vec<f64> = Vec::new();
    for (t, polar, azimuth) in candidates {
        if polished >= config.polish || best.is_some_and(|(bt, _)| t > bt + 2.0 * dt * scale) {
            break;
        }
        if failed.iter().any(|&f| (f - t).abs() <= 3.0 * dt * scale) {
            continue;
        }
        polished += 1;
        let m = nelder_mead(objective, &[polar, azimuth, t / scale], &[0.5 * span, 0.5 * span, dt], &config.nelder_mead);
        if m.value <= 0.1 * BANGBANG_TOL {
            let t = m.x[2] * scale;
            if best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, unit_vector(m.x[0], m.x[1])));
            }
        } else {
            failed.push(t);
        }
    }
    let (t, p0) = best?;
    let (u, schedule) = shoot_bangbang(p0, coupling, bounds, t)?;
    let z = target_overlap(&u, theta);
    log::debug!("bang-bang shooting: T = {t}, {} switches", schedule.switch_times.len());
    Some(BangBangSolution {
        schedule,
        costate: Some(p0),
        fidelity: (z.norm() / 2.0).min(1.0),
        sign: if z.re >= 0.0 { 1.0 } else { -1.0 },
        method: BangBangMethod::CostateShooting,
    })
}

/// Schedule whose segments last `T wᵢ² / Σw²`, alternating from `initial`;
/// empty segments are dropped and equal neighbours merged.
fn schedule_from_weights(weights: &[f64], initial: Level, bounds: (f64, f64), duration: f64) -> BangBangSchedule {
    let total: f64 = weights.iter().map(|w| w * w).sum();
    let mut switches = Vec::new();
    let mut first = None;
    let mut current = None;
    let mut level = initial;
    let mut acc = 0.0;
    for w in weights {
        let d = duration * w * w / total;
        if d > 0.0 {
            match current {
                None => first = Some(level),
                Some(c) if c != level && acc > 0.0 && acc < duration => switches.push(acc),
                _ => {}
            }
            current = Some(level);
        }
        acc += d;
        level = level.other();
    }
    BangBangSchedule {
        omega_min: bounds.0,
        omega_max: bounds.1,
        switch_times: switches,
        initial_level: first.unwrap_or(initial),
        duration,
    }
}

/// Bang-bang schedule reaching `target` exactly (SU(2) sign included) on a
/// fixed horizon, by multi-start search over up to `max_switches` switches.
pub fn bangbang_fixed_horizon(
    target: &Unitary2,
    coupling: f64,
    bounds: (f64, f64),
    duration: f64,
    config: &BangBangConfig,
) -> Result<BangBangSolution> {
    fixed_horizon(Goal::Signed(*target), coupling, bounds, duration, config)
        .ok_or_else(|| Error::SynthesisFailure { reason: "no schedule on the fixed horizon".into(), best_fidelity: 0.0 })
        .and_then(|(sol, infid)| {
            if infid <= BANGBANG_TOL {
                Ok(sol)
            } else {
                Err(Error::SynthesisFailure {
                    reason: format!("fixed-horizon bang-bang search reached infidelity {infid:e}"),
                    best_fidelity: sol.fidelity,
                })
            }
        })
}

#[derive(Clone, Copy)]
enum Goal {
    Signed(Unitary2),
    Angle(f64),
}

impl Goal {
    fn infidelity(&self, u: &Unitary2) -> (f64, f64) {
        match self {
            Goal::Signed(t) => {
                let z = t.matrix().hs_inner(u.matrix());
                (1.0 - z.re / 2.0, 1.0)
            }
            Goal::Angle(theta) => {
                let z = target_overlap(u, *theta);
                (1.0 - z.norm() / 2.0, if z.re >= 0.0 { 1.0 } else { -1.0 })
            }
        }
    }
}

fn fixed_horizon(
    goal: Goal,
    coupling: f64,
    bounds: (f64, f64),
    duration: f64,
    config: &BangBangConfig,
) -> Option<(BangBangSolution, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.nelder_mead.seed ^ 0x5eed);
    let mut best: Option<(f64, BangBangSchedule)> = None;
    let per_structure = (config.starts / (2 * (config.max_switches + 1))).max(2);
    'outer: for switches in 0..=config.max_switches {
        for initial in [Level::Min, Level::Max] {
            let objective = |x: &[f64]| {
                if x.iter().all(|&w| w == 0.0) {
                    return f64::NAN;
                }
                let s = schedule_from_weights(x, initial, bounds, duration);
                goal.infidelity(&s.propagator(coupling)).0
            };
            for i in 0..per_structure {
                let x0: Vec<f64> = (0..=switches).map(|_| rng.random_range(0.3..1.0)).collect();
                let nm = NelderMeadConfig { seed: config.nelder_mead.seed.wrapping_add(i as u64), ..config.nelder_mead.clone() };
                let m = nelder_mead(objective, &x0, &vec![0.2; x0.len()], &nm);
                if best.as_ref().is_none_or(|(v, _)| m.value < *v) {
                    best = Some((m.value, schedule_from_weights(&m.x, initial, bounds, duration)));
                }
                if best.as_ref().is_some_and(|(v, _)| *v <= 0.01 * BANGBANG_TOL) {
                    break 'outer;
                }
            }
        }
    }
    let (_, schedule) = best?;
    let (infid, sign) = goal.infidelity(&schedule.propagator(coupling));
    Some((
        BangBangSolution {
            schedule,
            costate: None,
            fidelity: (1.0 - infid).clamp(0.0, 1.0),
            sign,
            method: BangBangMethod::DirectSearch,
        },
        infid,
    ))
}

/// Direct search over schedules with at most `max_switches` switches for the
/// shortest horizon reaching `e^{−iθσx/2}`: a scan of `T` for the first
/// feasible horizon followed by bisection.
pub fn bangbang_direct_search(
    target_angle: f64,
    coupling: f64,
    bounds: (f64, f64),
    config: &BangBangConfig,
) -> Result<BangBangSolution> {
    check_bounds(bounds)?;
    let theta = normalize_angle(target_angle);
    let scale = time_scale(coupling, bounds);
    let goal = Goal::Angle(theta);
    let feasible = |t: f64| fixed_horizon(goal, coupling, bounds, t, config).filter(|(_, inf)| *inf <= 0.1 * BANGBANG_TOL);
    const GRID: usize = 48;
    let mut prev = 0.0;
    for k in 1..=GRID {
        let t = 2.5 * scale * k as f64 / GRID as f64;
        if let Some(mut found) = feasible(t) {
            let (mut lo, mut hi) = (prev, t);
            for _ in 0..16 {
                let mid = 0.5 * (lo + hi);
                match feasible(mid) {
                    Some(f) => {
                        hi = mid;
                        found = f;
                    }
                    None => lo = mid,
                }
            }
            return Ok(found.0);
        }
        prev = t;
    }
    Err(Error::SynthesisFailure {
        reason: format!("no bang-bang schedule within {:.3e} s", 2.5 * scale),
        best_fidelity: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{gate_fidelity, rx};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn schedule_validation_and_levels() {
        assert!(BangBangSchedule::new(1.0, -1.0, vec![], Level::Min, 1.0).is_err());
        assert!(BangBangSchedule::new(-1.0, 1.0, vec![0.5, 0.4], Level::Min, 1.0).is_err());
        assert!(BangBangSchedule::new(-1.0, 1.0, vec![1.0], Level::Min, 1.0).is_err());
        let s = BangBangSchedule::new(-1.0, 2.0, vec![0.2, 0.7], Level::Max, 1.0).unwrap();
        assert_eq!(s.levels(), vec![2.0, -1.0, 2.0]);
        let segs = s.segments();
        assert!((segs[1].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn next_zero_matches_brute_force() {
        let p = Costate::new(0.3, -0.5, 0.8);
        let (w, j) = (500.0, 200.0);
        let rate = f64::hypot(w, j);
        let n = [w / rate, j / rate, 0.0];
        let tau = next_zero(&p, n, rate).unwrap();
        assert!(rotate(&p, n, rate * tau).p1.abs() < 1e-12);
        // No earlier zero on a fine grid.
        let mut prev = p.p1;
        for i in 1..1000 {
            let q = rotate(&p, n, rate * tau * i as f64 / 1000.0);
            assert!(q.p1.signum() == prev.signum());
            prev = q.p1;
        }
    }

    #[test]
    fn driftless_single_segment() {
        let sol = bangbang_synthesize(1.2, 0.0, 0.0, 30.0, &BangBangConfig::default()).unwrap();
        assert!(sol.schedule.switch_times.is_empty());
        assert_eq!(sol.schedule.initial_level, Level::Max);
        assert!((sol.schedule.duration - 1.2 / 30.0).abs() < 1e-15);
        assert!(sol.fidelity > 1.0 - 1e-15);
    }

    #[test]
    fn shooting_reaches_quarter_turn() {
        let sol = bangbang_synthesize(FRAC_PI_2, 200.0, -1000.0, 1000.0, &BangBangConfig::default()).unwrap();
        assert!(sol.fidelity >= 1.0 - BANGBANG_TOL, "{sol:?}");
        assert_eq!(sol.method, BangBangMethod::CostateShooting);
        assert!(sol.schedule.duration <= PI / 100.0, "{sol:?}");
        let u = sol.schedule.propagator(200.0);
        assert!(gate_fidelity(&u, &rx(FRAC_PI_2)) >= 1.0 - BANGBANG_TOL);
    }

    #[test]
    fn fixed_horizon_hits_signed_target() {
        let target = rx(FRAC_PI_2).with_phase(PI);
        let sol = bangbang_fixed_horizon(&target, 200.0, (-1000.0, 1000.0), 0.015, &BangBangConfig::default()).unwrap();
        let u = sol.schedule.propagator(200.0);
        assert!(crate::algebra::signed_overlap(&u, &target) >= 1.0 - BANGBANG_TOL);
        assert!((sol.schedule.duration - 0.015).abs() < 1e-15);
    }
}
