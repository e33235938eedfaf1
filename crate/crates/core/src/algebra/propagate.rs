use serde::{Deserialize, Serialize};

use super::linalg::hermitian_eigen;
use super::matrix::{pauli, Matrix2, Matrix4, Unitary, Unitary2, Unitary4, C64};
use crate::error::{Error, Result};

/// `H = cx σx/2 + cy σy/2 + cz σz/2` (rad/s).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Hamiltonian2 {
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
}

impl Hamiltonian2 {
    pub const fn new(cx: f64, cy: f64, cz: f64) -> Self {
        Hamiltonian2 { cx, cy, cz }
    }

    pub fn matrix(&self) -> Matrix2 {
        (pauli::X.scale_real(self.cx) + pauli::Y.scale_real(self.cy) + pauli::Z.scale_real(self.cz))
            .scale_real(0.5)
    }

    pub fn is_finite(&self) -> bool {
        self.cx.is_finite() && self.cy.is_finite() && self.cz.is_finite()
    }

    /// `exp(−i H dt)`, closed form.
    pub fn evolve(&self, dt: f64) -> Unitary2 {
        su2_rotation([self.cx * dt, self.cy * dt, self.cz * dt])
    }
}

/// `exp(−i v·σ/2)` for an arbitrary rotation vector `v` (angle = |v|).
pub(crate) fn su2_rotation(v: [f64; 3]) -> Unitary2 {
    let angle = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if angle == 0.0 {
        return Unitary::identity();
    }
    let (s, c) = (0.5 * angle).sin_cos();
    let k = s / angle;
    let (x, y, z) = (v[0] * k, v[1] * k, v[2] * k);
    // c·I − i(x σx + y σy + z σz)
    Unitary::new_unchecked(Matrix2::new_const([
        [C64::new(c, -z), C64::new(-y, -x)],
        [C64::new(y, -x), C64::new(c, z)],
    ]))
}

/// `exp(−i θ n̂·σ/2)`.
pub fn expm_su2(axis: [f64; 3], angle: f64) -> Result<Unitary2> {
    if !angle.is_finite() || axis.iter().any(|a| !a.is_finite()) {
        return Err(Error::invalid("axis and angle must be finite"));
    }
    if angle == 0.0 {
        return Ok(Unitary::identity());
    }
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "rotation axis must be a unit vector (|n| = {norm})"
        )));
    }
    Ok(su2_rotation([axis[0] * angle, axis[1] * angle, axis[2] * angle]))
}

/// `exp(−i γ σx/2)`.
pub fn rx(angle: f64) -> Unitary2 {
    su2_rotation([angle, 0.0, 0.0])
}

/// `exp(−i β σy/2)`.
pub fn ry(angle: f64) -> Unitary2 {
    su2_rotation([0.0, angle, 0.0])
}

/// `exp(−i α σz/2)`.
pub fn rz(angle: f64) -> Unitary2 {
    su2_rotation([0.0, 0.0, angle])
}

/// Control amplitudes, phases and coupling of the two-qubit Hamiltonian
///
/// `H = ω1/2 (cos φ1 σx + sin φ1 σy)⊗I + ω2/2 I⊗(cos φ2 σx + sin φ2 σy) + J/2 σz⊗σz`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Hamiltonian4Params {
    pub omega1: f64,
    pub omega2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub coupling: f64,
}

impl Hamiltonian4Params {
    pub fn matrix(&self) -> Matrix4 {
        let (s1, c1) = self.phi1.sin_cos();
        let (s2, c2) = self.phi2.sin_cos();
        let local1 = (pauli::X.scale_real(c1) + pauli::Y.scale_real(s1)).scale_real(0.5 * self.omega1);
        let local2 = (pauli::X.scale_real(c2) + pauli::Y.scale_real(s2)).scale_real(0.5 * self.omega2);
        local1.kron(&pauli::ID)
            + pauli::ID.kron(&local2)
            + pauli::Z.kron(&pauli::Z).scale_real(0.5 * self.coupling)
    }

    pub fn is_finite(&self) -> bool {
        [self.omega1, self.omega2, self.phi1, self.phi2, self.coupling]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// `exp(−i H dt)` for a Hermitian 4×4 `H` via Jacobi eigendecomposition.
pub fn expm_hermitian4(h: &Matrix4, dt: f64) -> Unitary4 {
    let eig = hermitian_eigen(h);
    Unitary::new_unchecked(eig.apply(|l| C64::from_polar(1.0, -l * dt)))
}

fn check_grid(duration: f64, steps: usize) -> Result<f64> {
    if !(duration >= 0.0) || !duration.is_finite() {
        return Err(Error::invalid(format!("duration must be finite and ≥ 0, got {duration}")));
    }
    if steps == 0 {
        return Err(Error::invalid("steps must be ≥ 1"));
    }
    Ok(duration / steps as f64)
}

/// Time-ordered propagator of `i U' = H(t) U` on `[0, T]`.
///
/// Midpoint exponential rule: `U = ∏_k exp(−i H(t_k + Δ/2) Δ)`, later steps
/// applied on the left. Second order in `Δ`.
pub fn propagate2(
    hamiltonian: impl Fn(f64) -> Hamiltonian2,
    duration: f64,
    steps: usize,
) -> Result<Unitary2> {
    let dt = check_grid(duration, steps)?;
    let mut u = Unitary::identity();
    if dt == 0.0 {
        return Ok(u);
    }
    for k in 0..steps {
        let t = (k as f64 + 0.5) * dt;
        let h = hamiltonian(t);
        if !h.is_finite() {
            return Err(Error::IntegrationFailure {
                time: t,
                detail: format!("non-finite Hamiltonian {h:?}"),
            });
        }
        u = h.evolve(dt) * u;
    }
    Ok(u)
}

/// Two-qubit analogue of [`propagate2`].
pub fn propagate4(
    params: impl Fn(f64) -> Hamiltonian4Params,
    duration: f64,
    steps: usize,
) -> Result<Unitary4> {
    let dt = check_grid(duration, steps)?;
    let mut u = Unitary::identity();
    if dt == 0.0 {
        return Ok(u);
    }
    for k in 0..steps {
        let t = (k as f64 + 0.5) * dt;
        let p = params(t);
        if !p.is_finite() {
            return Err(Error::IntegrationFailure {
                time: t,
                detail: format!("non-finite control parameters {p:?}"),
            });
        }
        u = expm_hermitian4(&p.matrix(), dt) * u;
    }
    Ok(u)
}

/// Phase-invariant gate fidelity `|Tr(U†V)|/d`.
pub fn gate_fidelity<const N: usize>(u: &Unitary<N>, v: &Unitary<N>) -> f64 {
    (u.matrix().hs_inner(v.matrix()).norm() / N as f64).clamp(0.0, 1.0)
}

/// Phase-sensitive overlap `Re Tr(U†V)/d`; equals 1 only for `U = V`.
pub fn signed_overlap<const N: usize>(u: &Unitary<N>, v: &Unitary<N>) -> f64 {
    u.matrix().hs_inner(v.matrix()).re / N as f64
}

/// Fidelity between matrices given as flat row-major slices of dimension `d`.
///
/// The runtime-dimension entry point used where the dimension is not known
/// statically (file input); typed callers use [`gate_fidelity`].
pub fn gate_fidelity_dyn(u: &[C64], v: &[C64], d: usize) -> Result<f64> {
    if d == 0 || u.len() != d * d || v.len() != d * d {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} and {} entries for d = {d}",
            u.len(),
            v.len()
        )));
    }
    let tr: C64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
    Ok((tr.norm() / d as f64).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::matrix::{Matrix, ZERO};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    fn close<const N: usize>(a: &Unitary<N>, b: &Matrix<N>, tol: f64) -> bool {
        (*a.matrix() - *b).frobenius_norm() <= tol
    }

    #[test]
    fn expm_su2_closed_forms() {
        let id = expm_su2([0.3, 0.1, 0.2], 0.0).unwrap();
        assert!(close(&id, &Matrix::identity(), 0.0));

        let u = expm_su2([1.0, 0.0, 0.0], PI).unwrap();
        assert!(close(&u, &pauli::X.scale(C64::new(0.0, -1.0)), 1e-15));

        let n = [FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0];
        let u = expm_su2(n, FRAC_PI_2).unwrap();
        let expected = Matrix::identity().scale_real(FRAC_PI_4.cos())
            - (pauli::X + pauli::Y)
                .scale_real(FRAC_PI_4.sin() * FRAC_1_SQRT_2)
                .scale(C64::new(0.0, 1.0));
        assert!(close(&u, &expected, 1e-15));
    }

    #[test]
    fn expm_su2_rejects_non_unit_axis() {
        assert!(matches!(
            expm_su2([1.0, 1.0, 0.0], 0.5),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn constant_hamiltonians() {
        let (w0, j, t) = (3.0, 2.0, 0.7);
        let u = propagate2(|_| Hamiltonian2::new(w0, 0.0, 0.0), t, 17).unwrap();
        assert!(u.distance(&rx(w0 * t)) < 1e-13);
        let u = propagate2(|_| Hamiltonian2::new(0.0, j, 0.0), t, 5).unwrap();
        assert!(u.distance(&ry(j * t)) < 1e-14);
    }

    #[test]
    fn pure_coupling_full_period_is_minus_identity() {
        let j = 200.0;
        let p = Hamiltonian4Params { coupling: j, ..Default::default() };
        let u = propagate4(|_| p, 2.0 * PI / j, 8).unwrap();
        assert!(close(&u, &Matrix::identity().scale_real(-1.0), 1e-12));
    }

    #[test]
    fn four_by_four_exponential_matches_tensor_product_when_uncoupled() {
        let p = Hamiltonian4Params { omega1: 1.3, omega2: -0.4, phi1: 0.2, phi2: 1.1, coupling: 0.0 };
        let u = expm_hermitian4(&p.matrix(), 0.9);
        let a = su2_rotation([1.3 * 0.2f64.cos() * 0.9, 1.3 * 0.2f64.sin() * 0.9, 0.0]);
        let b = su2_rotation([-0.4 * 1.1f64.cos() * 0.9, -0.4 * 1.1f64.sin() * 0.9, 0.0]);
        assert!(u.distance(&a.kron(&b)) < 1e-13);
    }

    #[test]
    fn non_finite_sampler_reports_time() {
        let err = propagate2(|t| Hamiltonian2::new(if t > 0.5 { f64::NAN } else { 0.0 }, 0.0, 0.0), 1.0, 4)
            .unwrap_err();
        match err {
            Error::IntegrationFailure { time, .. } => assert_eq!(time, 0.625),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn zero_duration_is_identity() {
        let u = propagate2(|_| Hamiltonian2::new(5.0, 5.0, 5.0), 0.0, 3).unwrap();
        assert_eq!(u, Unitary::identity());
        assert!(propagate2(|_| Hamiltonian2::default(), 1.0, 0).is_err());
        assert!(propagate2(|_| Hamiltonian2::default(), -1.0, 1).is_err());
    }

    #[test]
    fn fidelity_basics() {
        let u = rx(0.4) * ry(1.1);
        assert!((gate_fidelity(&u, &u) - 1.0).abs() < 1e-15);
        assert!((gate_fidelity(&u, &u.with_phase(0.77)) - 1.0).abs() < 1e-15);
        let x = Unitary::new(pauli::X).unwrap();
        assert_eq!(gate_fidelity(&Unitary2::identity(), &x), 0.0);
        assert!((signed_overlap(&u, &u.with_phase(PI)) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn dynamic_fidelity_checks_dimensions() {
        let a = vec![ZERO; 4];
        let b = vec![ZERO; 16];
        assert!(gate_fidelity_dyn(&a, &b, 2).is_err());
        let id: Vec<C64> = (0..4).map(|i| if i % 3 == 0 { C64::new(1.0, 0.0) } else { ZERO }).collect();
        assert_eq!(gate_fidelity_dyn(&id, &id, 2).unwrap(), 1.0);
    }
}
