//! Derivative-free minimization (Nelder–Mead simplex with seeded restarts).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadConfig {
    /// Total objective evaluations across all restarts.
    pub max_evaluations: usize,
    /// Stop when every simplex edge is below `xtol_rel · max(1, |x_i|)`.
    pub xtol_rel: f64,
    /// Stop when the spread of simplex values is at most this.
    pub ftol_abs: f64,
    /// Restarts from a perturbed simplex around the incumbent.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        NelderMeadConfig {
            max_evaluations: 2000,
            xtol_rel: 1e-8,
            ftol_abs: 1e-15,
            restarts: 3,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Whether the last simplex met a tolerance before the budget ran out.
    pub converged: bool,
}

struct Counted<F> {
    f: F,
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        let v = (self.f)(x);
        // NaN and −∞ are both treated as failures.
        if v.is_nan() || v == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            v
        }
    }
}

/// Minimize `f` from `x0` with initial simplex edges `steps`.
pub fn nelder_mead(
    f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    config: &NelderMeadConfig,
) -> Minimum {
    assert_eq!(x0.len(), steps.len(), "one step per coordinate");
    let mut counted = Counted { f, evaluations: 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best_x = x0.to_vec();
    let mut best_v = counted.eval(x0);
    let mut converged = false;

    for round in 0..=config.restarts {
        if counted.evaluations >= config.max_evaluations {
            break;
        }
        let edge: Vec<f64> = if round == 0 {
            steps.to_vec()
        } else {
            steps
                .iter()
                .map(|s| s * rng.random_range(0.05..0.5) * if rng.random_bool(0.5) { 1.0 } else { -1.0 })
                .collect()
        };
        let (x, v, conv) = simplex_run(&mut counted, &best_x, best_v, &edge, config);
        let improved = v < best_v;
        if v <= best_v {
            best_x = x;
            best_v = v;
        }
        converged = conv;
        if round > 0 && !improved {
            break;
        }
    }
    Minimum {
        x: best_x,
        value: best_v,
        evaluations: counted.evaluations,
        converged,
    }
}

fn simplex_run<F: FnMut(&[f64]) -> f64>(
    counted: &mut Counted<F>,
    x0: &[f64],
    v0: f64,
    edge: &[f64],
    config: &NelderMeadConfig,
) -> (Vec<f64>, f64, bool) {
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    let mut vals = vec![v0];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += if edge[i] != 0.0 { edge[i] } else { 1e-3 };
        vals.push(counted.eval(&p));
        pts.push(p);
    }

    let mut converged = false;
    while counted.evaluations < config.max_evaluations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        if simplex_small(&pts, config.xtol_rel) || (vals[n] - vals[0]).abs() <= config.ftol_abs {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|d| pts[..n].iter().map(|p| p[d]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(1.0);
        let vr = counted.eval(&xr);
        if vr < vals[0] {
            let xe = along(2.0);
            let ve = counted.eval(&xe);
            if ve < vr {
                pts[n] = xe;
                vals[n] = ve;
            } else {
                pts[n] = xr;
                vals[n] = vr;
            }
            continue;
        }
        if vr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = vr;
            continue;
        }
        let (xc, vc) = if vr < vals[n] {
            let xc = along(0.5);
            let vc = counted.eval(&xc);
            (xc, vc)
        } else {
            let xc = along(-0.5);
            let vc = counted.eval(&xc);
            (xc, vc)
        };
        if vc < vals[n].min(vr) {
            pts[n] = xc;
            vals[n] = vc;
            continue;
        }
        // Shrink towards the best vertex.
        for i in 1..=n {
            let p: Vec<f64> = pts[0].iter().zip(&pts[i]).map(|(b, x)| b + 0.5 * (x - b)).collect();
            vals[i] = counted.eval(&p);
            pts[i] = p;
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).expect("non-empty");
    (pts[best].clone(), vals[best], converged)
}

fn simplex_small(pts: &[Vec<f64>], xtol_rel: f64) -> bool {
    let best = &pts[0];
    pts[1..].iter().all(|p| {
        p.iter()
            .zip(best)
            .all(|(a, b)| (a - b).abs() <= xtol_rel * b.abs().max(1.0))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let m = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 4.0 * (x[1] + 2.0).powi(2) + 0.5,
            &[0.0, 0.0],
            &[0.5, 0.5],
            &NelderMeadConfig::default(),
        );
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] + 2.0).abs() < 1e-6, "{m:?}");
        assert!((m.value - 0.5).abs() < 1e-12);
        assert!(m.evaluations <= 2000);
    }

    #[test]
    fn rosenbrock() {
        let cfg = NelderMeadConfig { ftol_abs: 0.0, ..Default::default() };
        let m = nelder_mead(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            &[0.1, 0.1],
            &cfg,
        );
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5, "{m:?}");
    }

    #[test]
    fn respects_budget_and_is_deterministic() {
        let cfg = NelderMeadConfig { max_evaluations: 50, ..Default::default() };
        let f = |x: &[f64]| x.iter().map(|v| v.sin() + 0.1 * v * v).sum::<f64>();
        let a = nelder_mead(f, &[2.0, -1.0, 0.3], &[0.4; 3], &cfg);
        let b = nelder_mead(f, &[2.0, -1.0, 0.3], &[0.4; 3], &cfg);
        assert_eq!(a, b);
        assert!(a.evaluations <= 50 + 3);
    }

    #[test]
    fn nan_objective_is_avoided() {
        let m = nelder_mead(
            |x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.25).powi(2) },
            &[1.0],
            &[0.5],
            &NelderMeadConfig::default(),
        );
        assert!((m.x[0] - 0.25).abs() < 1e-6);
    }

    #[test]
    fn optimum_seed_is_fixed_point() {
        let m = nelder_mead(|x| x[0] * x[0] + x[1] * x[1], &[0.0, 0.0], &[1e-3, 1e-3], &NelderMeadConfig::default());
        assert_eq!(m.value, 0.0);
        assert!(m.x.iter().all(|v| v.abs() < 1e-8));
    }
}
