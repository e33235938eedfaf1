//! Jacobi elliptic functions through the arithmetic-geometric mean.
//!
//! Everything here takes the modulus `k` (not the parameter `m = k²`). The
//! minimum-energy control has the form `ω(t) = 2bk·cn(bt + f, k)`, which solves
//! `ω'' = λω − ω³/2` with `λ = b²(2k² − 1)`; the amplitude `2bk` is what ties
//! the cubic coefficient to `1/2` in that convention.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this modulus `cn(u, k)` is returned as `cos u` (error `O(k²)`).
pub const SMALL_MODULUS: f64 = 1e-7;

const AGM_TOL: f64 = 1e-16;
const MAX_AGM_STEPS: usize = 64;

/// Elliptic modulus `k ∈ [0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if (0.0..1.0).contains(&k) {
            Ok(EllipticModulus(k))
        } else {
            Err(Error::invalid(format!("elliptic modulus must lie in [0, 1), got {k}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Complementary modulus `√(1 − k²)`.
    pub fn complement(self) -> f64 {
        ((1.0 - self.0) * (1.0 + self.0)).sqrt()
    }
}

impl TryFrom<f64> for EllipticModulus {
    type Error = Error;

    fn try_from(k: f64) -> Result<Self> {
        EllipticModulus::new(k)
    }
}

impl From<EllipticModulus> for f64 {
    fn from(k: EllipticModulus) -> f64 {
        k.0
    }
}

/// Complete elliptic integral of the first kind, `K(k) = π / (2 AGM(1, k'))`.
pub fn quarter_period(k: EllipticModulus) -> f64 {
    let (mut a, mut b) = (1.0, k.complement());
    for _ in 0..MAX_AGM_STEPS {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    FRAC_PI_2 / a
}

/// Checked variant of [`quarter_period`] for raw moduli.
pub fn quarter_period_checked(k: f64) -> Result<f64> {
    EllipticModulus::new(k).map(quarter_period)
}

/// `(sn, cn, dn)` of `u` with modulus `k`.
///
/// Descending Landen sequence: run the AGM of `(1, k')` recording
/// `c_n = (a_{n−1} − b_{n−1})/2`, start from `φ_N = 2^N a_N u`, and recurse
/// `φ_{n−1} = (φ_n + asin(c_n/a_n · sin φ_n))/2` back to the amplitude `φ_0`.
pub fn jacobi_sn_cn_dn(u: f64, k: EllipticModulus) -> (f64, f64, f64) {
    let kv = k.value();
    if kv < SMALL_MODULUS {
        let (s, c) = u.sin_cos();
        return (s, c, 1.0);
    }
    // Reduce into one period so the phase recursion starts from a moderate angle.
    let period = 4.0 * quarter_period(k);
    let u = u - period * (u / period).round();

    let mut a = [0.0f64; MAX_AGM_STEPS + 1];
    let mut c = [0.0f64; MAX_AGM_STEPS + 1];
    a[0] = 1.0;
    c[0] = kv;
    let mut b = k.complement();
    let mut n = 0;
    while n < MAX_AGM_STEPS && c[n].abs() > AGM_TOL {
        let an = a[n];
        a[n + 1] = 0.5 * (an + b);
        c[n + 1] = 0.5 * (an - b);
        b = (an * b).sqrt();
        n += 1;
    }
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for i in (1..=n).rev() {
        phi = 0.5 * (phi + (c[i] / a[i] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    // The Landen form cos φ0 / cos(φ1 − φ0) is 0/0 at the zeros of cn.
    let dn = (1.0 - kv * kv * sn * sn).sqrt();
    (sn, cn, dn)
}

/// Elliptic cosine `cn(u, k)`.
pub fn jacobi_cn(u: f64, k: EllipticModulus) -> f64 {
    jacobi_sn_cn_dn(u, k).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn km(k: f64) -> EllipticModulus {
        EllipticModulus::new(k).unwrap()
    }

    /// Adaptive Simpson on the defining integral of K(k); the oracle for the AGM.
    fn k_by_quadrature(k: f64) -> f64 {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
        let f = |t: f64| 1.0 / (1.0 - k * k * t.sin().powi(2)).sqrt();
        let (a, b) = (0.0, FRAC_PI_2);
        let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        simpson(&f, a, b, fa, fm, fb, whole, 1e-15, 40)
    }

    /// Amplitude `am(u)` from `dφ/du = √(1 − k² sin²φ)` by fine RK4; an
    /// oracle independent of the AGM.
    pub(crate) fn amplitude_by_ode(u: f64, k: f64, steps: usize) -> f64 {
        let f = |phi: f64| (1.0 - k * k * phi.sin().powi(2)).sqrt();
        let h = u / steps as f64;
        let mut phi = 0.0;
        for _ in 0..steps {
            let k1 = f(phi);
            let k2 = f(phi + 0.5 * h * k1);
            let k3 = f(phi + 0.5 * h * k2);
            let k4 = f(phi + h * k3);
            phi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        phi
    }

    #[test]
    fn cn_matches_amplitude_ode_oracle() {
        for k in [0.1, 0.246, 0.5, 0.8, 0.95] {
            let kk = quarter_period(km(k));
            for j in 1..=16 {
                let u = 8.0 * kk * j as f64 / 16.0;
                let oracle = amplitude_by_ode(u, k, 20_000).cos();
                assert!((jacobi_cn(u, km(k)) - oracle).abs() <= 1e-10, "k={k} u={u}");
                assert!((jacobi_cn(-u, km(k)) - oracle).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn quarter_period_values() {
        assert_eq!(quarter_period(km(0.0)), FRAC_PI_2);
        let oracle = k_by_quadrature(0.5);
        let agm = quarter_period(km(0.5));
        assert!((agm - oracle).abs() <= 1e-12 * oracle, "{agm} vs {oracle}");
        // Frozen from the quadrature oracle.
        assert!((agm - 1.685_750_354_812_596).abs() < 1e-14);
        for k in [0.1, 0.3, 0.7, 0.9, 0.99] {
            let o = k_by_quadrature(k);
            assert!((quarter_period(km(k)) - o).abs() <= 1e-12 * o);
        }
    }

    #[test]
    fn quarter_period_increases() {
        let mut prev = 0.0;
        for i in 0..100 {
            let k = i as f64 / 100.0;
            let kk = quarter_period(km(k));
            assert!(kk > prev);
            prev = kk;
        }
    }

    #[test]
    fn rejects_out_of_range_modulus() {
        assert!(quarter_period_checked(1.0).is_err());
        assert!(quarter_period_checked(-0.1).is_err());
        assert!(quarter_period_checked(f64::NAN).is_err());
    }

    #[test]
    fn cn_special_values() {
        for k in [0.0, 1e-9, 0.2, 0.5, 0.9, 0.999] {
            assert_eq!(jacobi_cn(0.0, km(k)), 1.0);
            let kk = quarter_period(km(k));
            assert!(jacobi_cn(kk, km(k)).abs() < 1e-12, "k = {k}");
            assert!((jacobi_cn(2.0 * kk, km(k)) + 1.0).abs() < 1e-12);
        }
        for u in [-3.0, -0.5, 0.1, 1.0, 7.5] {
            assert_eq!(jacobi_cn(u, km(0.0)), f64::cos(u));
        }
    }

    #[test]
    fn small_modulus_matches_cosine_to_second_order() {
        let k = km(1e-3);
        for u in [0.3, 1.7, 4.0] {
            assert!((jacobi_cn(u, k) - u.cos()).abs() < 1e-5);
        }
    }

    #[test]
    fn identities_and_periodicity_on_grid() {
        for i in 0..10 {
            let k = km(i as f64 / 10.0);
            let kk = quarter_period(k);
            for j in 0..=200 {
                let u = -4.0 * kk + 8.0 * kk * j as f64 / 200.0;
                let (sn, cn, dn) = jacobi_sn_cn_dn(u, k);
                assert!((sn * sn + cn * cn - 1.0).abs() <= 1e-10);
                assert!((dn * dn - (1.0 - k.value().powi(2) * sn * sn)).abs() <= 1e-10);
                assert!((jacobi_cn(u + 4.0 * kk, k) - cn).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn matches_known_value() {
        // Reference values at u = 1, k = 0.5 (m = 0.25), 30-digit arithmetic.
        let (sn, cn, dn) = jacobi_sn_cn_dn(1.0, km(0.5));
        assert!((sn - 0.822_635_578_129_862_4).abs() < 1e-13, "{sn}");
        assert!((cn - 0.568_568_998_095_171_5).abs() < 1e-13, "{cn}");
        assert!((dn - 0.911_492_005_669_131_9).abs() < 1e-13, "{dn}");
        // Odd/even symmetry.
        assert_eq!(jacobi_cn(-1.0, km(0.5)), cn);
        assert!((jacobi_sn_cn_dn(PI, km(0.3)).0 + jacobi_sn_cn_dn(-PI, km(0.3)).0).abs() < 1e-15);
    }

    #[test]
    fn waveform_solves_cubic_oscillator() {
        // ω = 2bk·cn(bt + f, k) against ω'' = b²(2k² − 1)ω − ω³/2, second differences.
        for &(b, f, k) in &[(200.0, -0.0014, 0.246), (150.0, 0.3, 0.6), (50.0, 1.0, 0.05)] {
            let km = km(k);
            let w = |t: f64| 2.0 * b * k * jacobi_cn(b * t + f, km);
            let lambda = b * b * (2.0 * k * k - 1.0);
            let h = 1e-3 / b;
            let amp = 2.0 * b * k;
            for i in 1..50 {
                let t = i as f64 * 0.01 / b;
                let fd = (w(t + h) - 2.0 * w(t) + w(t - h)) / (h * h);
                let rhs = lambda * w(t) - 0.5 * w(t).powi(3);
                let scale = b * b * amp;
                assert!((fd - rhs).abs() <= 1e-5 * scale, "b={b} k={k} t={t}: {fd} vs {rhs}");
            }
        }
    }
}
