use serde::{Deserialize, Serialize};

use crate::elliptic::{jacobi_cn, EllipticModulus};

/// A scalar control signal `ω(t)` in rad/s on stage-local time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Waveform {
    Zero,
    /// `amplitude · cos(frequency · t)`.
    Sinusoid { amplitude: f64, frequency: f64 },
    /// `amplitude · cos(frequency · t + phase)`.
    PhasedSinusoid { amplitude: f64, frequency: f64, phase: f64 },
    /// `2bk · cn(bt + f, k)`.
    Elliptic { b: f64, f: f64, k: EllipticModulus },
    /// `levels[i]` on `[switch_times[i−1], switch_times[i])`.
    PiecewiseConstant { levels: Vec<f64>, switch_times: Vec<f64> },
    /// Linear interpolation through `(times[i], values[i])`; constant outside.
    Sampled { times: Vec<f64>, values: Vec<f64> },
    /// `Σ weight · term`.
    Linear { terms: Vec<(f64, Waveform)> },
}

impl Waveform {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Waveform::Zero => 0.0,
            Waveform::Sinusoid { amplitude, frequency } => amplitude * (frequency * t).cos(),
            Waveform::PhasedSinusoid { amplitude, frequency, phase } => amplitude * (frequency * t + phase).cos(),
            Waveform::Elliptic { b, f, k } => 2.0 * b * k.value() * jacobi_cn(b * t + f, *k),
            Waveform::PiecewiseConstant { levels, switch_times } => {
                let i = switch_times.partition_point(|&s| s <= t);
                levels[i]
            }
            Waveform::Sampled { times, values } => interpolate(times, values, t),
            Waveform::Linear { terms } => terms.iter().map(|(w, term)| w * term.eval(t)).sum(),
        }
    }

    /// Interior points where the signal may be discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Waveform::PiecewiseConstant { switch_times, .. } => switch_times.clone(),
            // A repeated sample time marks a jump.
            Waveform::Sampled { times, .. } => {
                let mut jumps: Vec<f64> = times.windows(2).filter(|w| w[0] == w[1]).map(|w| w[0]).collect();
                jumps.dedup();
                jumps
            }
            Waveform::Linear { terms } => {
                let mut all: Vec<f64> = terms.iter().flat_map(|(_, w)| w.breakpoints()).collect();
                all.sort_by(f64::total_cmp);
                all.dedup();
                all
            }
            _ => Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Waveform::Zero => true,
            Waveform::Sinusoid { amplitude, .. } | Waveform::PhasedSinusoid { amplitude, .. } => *amplitude == 0.0,
            Waveform::Elliptic { b, k, .. } => *b == 0.0 || k.value() == 0.0,
            Waveform::PiecewiseConstant { levels, .. } => levels.iter().all(|&l| l == 0.0),
            Waveform::Sampled { values, .. } => values.iter().all(|&v| v == 0.0),
            Waveform::Linear { terms } => terms.iter().all(|(w, t)| *w == 0.0 || t.is_zero()),
        }
    }

    /// `a·x + b·y`, collapsing zeros.
    pub fn combine(a: f64, x: &Waveform, b: f64, y: &Waveform) -> Waveform {
        let mut terms = Vec::new();
        if a != 0.0 && !x.is_zero() {
            terms.push((a, x.clone()));
        }
        if b != 0.0 && !y.is_zero() {
            terms.push((b, y.clone()));
        }
        match terms.len() {
            0 => Waveform::Zero,
            _ => Waveform::Linear { terms },
        }
    }
}

fn interpolate(times: &[f64], values: &[f64], t: f64) -> f64 {
    match times.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            if t <= times[0] {
                return values[0];
            }
            if t >= times[n - 1] {
                return values[n - 1];
            }
            let i = times.partition_point(|&s| s <= t).clamp(1, n - 1);
            let (t0, t1) = (times[i - 1], times[i]);
            let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 1.0 };
            values[i - 1] + w * (values[i] - values[i - 1])
        }
    }
}

/// Split `[0, duration]` at `breaks` into at most `steps` midpoint steps,
/// at least one per piece; calls `visit(start, length, steps)` per piece.
pub(crate) fn for_each_piece(duration: f64, breaks: &[f64], steps: usize, mut visit: impl FnMut(f64, f64, usize)) {
    let mut edges = vec![0.0];
    edges.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < duration));
    edges.push(duration);
    for w in edges.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        let n = ((steps as f64 * len / duration).round() as usize).max(1);
        visit(w[0], len, n);
    }
}
