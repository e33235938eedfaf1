//! Algebraic decoupling of the ZZ-coupled two-qubit system.
//!
//! With both phases at zero the controls and the coupling generate a copy of
//! so(4) ≅ su(2)⊕su(2). The six ε operators below realize the two su(2)
//! factors; in the basis given by [`BlockBasis`] they become block diagonal,
//! so
//!
//! ```text
//! H1 = ω1/2 σx¹ + ω2/2 σx² + J/2 σz¹σz²
//!    = (ω1−ω2) ε¹x + J ε¹y + (ω1+ω2) ε²x − J ε²y
//!   ≅ diag((ω1−ω2) σx/2 + J σy/2,  (ω1+ω2) σx/2 − J σy/2)
//! ```
//!
//! and the target `e^{−iγ1σx/2} ⊗ e^{−iγ2σx/2}` becomes
//! `diag(e^{−i(γ1−γ2)σx/2}, e^{−i(γ1+γ2)σx/2})`.
//!
//! The block signs matter: `diag(−U_a, U_b)` is a different gate from
//! `diag(U_a, U_b)` (it differs by σx⊗σx), so both subproblems must land on
//! their targets with the same SU(2) sign. The closed-form sinusoids give
//! both blocks the common factor `(−1)^n` because they share `υT = 2nπ`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::algebra::{
    linalg::hermitian_eigen, pauli, rx, su2_rotation, Hamiltonian2, Matrix, Matrix2, Matrix4,
    Unitary, Unitary2, Unitary4, C64, ZERO,
};
use crate::error::{Error, Result};

/// Component of the ε basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X = 0,
    Y = 1,
    Z = 2,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// The six Hermitian generators `ε^j_a`, indexed `[j][a]` with `j = 0` for
/// the first su(2) factor and `j = 1` for the second.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonBasis {
    pub eps: [[Matrix4; 3]; 2],
}

/// Entry of the commutator table `[iε^j_a, iε^j_b] = sign · iε^j_c`.
///
/// Cross-factor commutators vanish.
pub fn commutator_table(a: Axis, b: Axis) -> Option<(f64, Axis)> {
    use Axis::*;
    match (a, b) {
        (X, Y) => Some((-1.0, Z)),
        (X, Z) => Some((1.0, Y)),
        (Y, X) => Some((1.0, Z)),
        (Y, Z) => Some((-1.0, X)),
        (Z, X) => Some((-1.0, Y)),
        (Z, Y) => Some((1.0, X)),
        _ => None,
    }
}

fn two_body(a: &Matrix2, b: &Matrix2) -> Matrix4 {
    a.kron(b)
}

pub fn build_epsilon_basis() -> EpsilonBasis {
    use pauli::{ID, X, Y, Z};
    let xi = two_body(&X, &ID);
    let ix = two_body(&ID, &X);
    let yy = two_body(&Y, &Y);
    let zz = two_body(&Z, &Z);
    let zy = two_body(&Z, &Y);
    let yz = two_body(&Y, &Z);
    let q = |m: Matrix4| m.scale_real(0.25);
    EpsilonBasis {
        eps: [
            [q(xi - ix), q(yy + zz), q(zy - yz)],
            [q(xi + ix), q(yy - zz), q(zy + yz)],
        ],
    }
}

impl EpsilonBasis {
    pub fn get(&self, factor: usize, axis: Axis) -> &Matrix4 {
        &self.eps[factor][axis as usize]
    }

    /// Largest entrywise deviation of all 36 commutators from the table.
    pub fn commutator_table_residual(&self) -> f64 {
        let i = C64::new(0.0, 1.0);
        let mut worst: f64 = 0.0;
        for j1 in 0..2 {
            for a in Axis::ALL {
                for j2 in 0..2 {
                    for b in Axis::ALL {
                        let lhs = self.get(j1, a).scale(i).commutator(&self.get(j2, b).scale(i));
                        let rhs = match (j1 == j2, commutator_table(a, b)) {
                            (true, Some((sign, c))) => self.get(j1, c).scale(i * sign),
                            _ => Matrix4::zeros(),
                        };
                        worst = worst.max(max_abs(&(lhs - rhs)));
                    }
                }
            }
        }
        worst
    }
}

fn max_abs<const N: usize>(m: &Matrix<N>) -> f64 {
    m.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hermitian parts of the generators of the algebra produced by
/// `iσx¹/2, iσx²/2, iσz¹σz²/2`.
pub fn coupled_algebra_generators() -> [Matrix4; 6] {
    use pauli::{ID, X, Y, Z};
    let h = |a: &Matrix2, b: &Matrix2| two_body(a, b).scale_real(0.5);
    [h(&X, &ID), h(&ID, &X), h(&Z, &Y), h(&Y, &Z), h(&Y, &Y), h(&Z, &Z)]
}

/// Distance from `m` to the real span of `basis`, assuming the basis elements
/// are mutually Hilbert-Schmidt orthogonal (true for Pauli strings).
pub fn real_span_residual(m: &Matrix4, basis: &[Matrix4]) -> f64 {
    let mut rest = *m;
    for b in basis {
        let coeff = b.hs_inner(m).re / b.hs_inner(b).re;
        rest = rest - b.scale_real(coeff);
    }
    rest.frobenius_norm()
}

/// Which 2×2 block of the rotated frame carries which su(2) factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockOrder {
    /// Rows 0–1: factor ε¹ (subproblem a); rows 2–3: factor ε² (subproblem b).
    FirstFactorUpper,
}

/// Unitary `Q` with `Q ε^j_a Q† = σ_a/2` in block `j` and zero in the other.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockBasis {
    pub q: Unitary4,
    pub block_order: BlockOrder,
}

/// Block-diagonalization residual above which [`compute_block_basis`] fails.
pub const BLOCK_TOL: f64 = 1e-10;

/// Fix the phase of a vector so its largest component is real positive.
fn canonical_phase(v: &mut [C64; 4]) {
    let mut pivot = 0;
    for k in 1..4 {
        if v[k].norm() > v[pivot].norm() + 1e-12 {
            pivot = k;
        }
    }
    let ph = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= ph;
    }
}

fn apply(m: &Matrix4, v: &[C64; 4]) -> [C64; 4] {
    let mut out = [ZERO; 4];
    for (i, o) in out.iter_mut().enumerate() {
        for (j, vj) in v.iter().enumerate() {
            *o += m.0[i][j] * vj;
        }
    }
    out
}

/// Spin-½ basis `{e0, e1}` of the subspace on which one su(2) factor acts:
/// `e0` is the `+½` eigenvector of `ε_z`, `e1 = 2 ε_x e0`.
fn factor_basis(eps: &[Matrix4; 3]) -> [[C64; 4]; 2] {
    let eig = hermitian_eigen(&eps[Axis::Z as usize]);
    let top = (0..4)
        .max_by(|&a, &b| eig.values[a].total_cmp(&eig.values[b]))
        .expect("non-empty");
    let mut e0 = eig.vector(top);
    canonical_phase(&mut e0);
    let mut e1 = apply(&eps[Axis::X as usize], &e0);
    for z in e1.iter_mut() {
        *z *= 2.0;
    }
    [e0, e1]
}

pub fn compute_block_basis(basis: &EpsilonBasis) -> Result<BlockBasis> {
    let [a0, a1] = factor_basis(&basis.eps[0]);
    let [b0, b1] = factor_basis(&basis.eps[1]);
    let rows = [a0, a1, b0, b1];
    let q = Matrix4::from_fn(|r, c| rows[r][c].conj());

    let mut residual = q.unitarity_defect();
    let block = BlockBasis {
        q: Unitary::new_unchecked(q),
        block_order: BlockOrder::FirstFactorUpper,
    };
    for j in 0..2 {
        for a in Axis::ALL {
            let (upper, lower, off) = block.split(basis.get(j, a));
            let half = pauli::XYZ[a as usize].scale_real(0.5);
            let (on, zero) = if j == 0 { (upper, lower) } else { (lower, upper) };
            residual = residual
                .max(off)
                .max((on - half).frobenius_norm())
                .max(zero.frobenius_norm());
        }
    }
    if !(residual <= BLOCK_TOL) {
        return Err(Error::ConstructionFailure { residual });
    }
    Ok(block)
}

impl BlockBasis {
    /// The basis for the standard ε operators, computed once.
    pub fn standard() -> &'static BlockBasis {
        static CELL: OnceLock<BlockBasis> = OnceLock::new();
        CELL.get_or_init(|| {
            compute_block_basis(&build_epsilon_basis()).expect("standard ε basis decomposes")
        })
    }

    /// Rotate `m` into the block frame: returns the two diagonal 2×2 blocks of
    /// `Q m Q†` and the Frobenius norm of the off-diagonal blocks.
    pub fn split(&self, m: &Matrix4) -> (Matrix2, Matrix2, f64) {
        let q = self.q.matrix();
        let r = *q * *m * q.adjoint();
        let upper = Matrix2::from_fn(|i, j| r.0[i][j]);
        let lower = Matrix2::from_fn(|i, j| r.0[i + 2][j + 2]);
        let mut off = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                off += r.0[i][j + 2].norm_sqr() + r.0[i + 2][j].norm_sqr();
            }
        }
        (upper, lower, off.sqrt())
    }

    /// `Q† diag(a, b) Q`.
    pub fn assemble(&self, a: &Unitary2, b: &Unitary2) -> Unitary4 {
        let d = Matrix4::from_fn(|i, j| match (i < 2, j < 2) {
            (true, true) => a.matrix().0[i][j],
            (false, false) => b.matrix().0[i - 2][j - 2],
            _ => ZERO,
        });
        let q = self.q.matrix();
        Unitary::new_unchecked(q.adjoint() * d * *q)
    }
}

/// Effective single-qubit Hamiltonians of the two subproblems as `(cx, cy)`:
/// `a = (ω1−ω2, +J)`, `b = (ω1+ω2, −J)`.
pub fn decouple_hamiltonian(omega1: f64, omega2: f64, coupling: f64) -> (Hamiltonian2, Hamiltonian2) {
    (
        Hamiltonian2::new(omega1 - omega2, coupling, 0.0),
        Hamiltonian2::new(omega1 + omega2, -coupling, 0.0),
    )
}

/// `(γ1 − γ2, γ1 + γ2)`.
pub fn subproblem_targets(gamma1: f64, gamma2: f64) -> (f64, f64) {
    (gamma1 - gamma2, gamma1 + gamma2)
}

/// Inverse of [`subproblem_targets`].
pub fn qubit_angles(theta_a: f64, theta_b: f64) -> (f64, f64) {
    (0.5 * (theta_a + theta_b), 0.5 * (theta_b - theta_a))
}

/// Physical amplitudes `(ω1, ω2)` from the subproblem controls `(ω1−ω2, ω1+ω2)`.
pub fn qubit_controls(omega_a: f64, omega_b: f64) -> (f64, f64) {
    (0.5 * (omega_a + omega_b), 0.5 * (omega_b - omega_a))
}

/// Channel of `(ω1, ω2)` that drives a subproblem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControlChannel {
    Difference,
    Sum,
}

/// A single-qubit steering problem `i U' = (ω σx/2 + s J σy/2) U`, target `e^{−iθσx/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubproblemSpec {
    pub control_channel: ControlChannel,
    pub drift_sign: f64,
    pub target_angle: f64,
    /// Fixed horizon in seconds, or `None` when free.
    pub horizon: Option<f64>,
}

impl SubproblemSpec {
    pub fn new(
        control_channel: ControlChannel,
        drift_sign: f64,
        target_angle: f64,
        horizon: Option<f64>,
    ) -> Result<Self> {
        if !target_angle.is_finite() {
            return Err(Error::invalid("target angle must be finite"));
        }
        if drift_sign != 1.0 && drift_sign != -1.0 {
            return Err(Error::invalid("drift sign must be ±1"));
        }
        if let Some(t) = horizon {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::invalid("fixed horizon must be positive"));
            }
        }
        Ok(SubproblemSpec {
            control_channel,
            drift_sign,
            target_angle,
            horizon,
        })
    }

    /// Subproblems a and b for the stage target `(γ1, γ2)`.
    pub fn pair(gamma1: f64, gamma2: f64, horizon: Option<f64>) -> Result<(Self, Self)> {
        let (ta, tb) = subproblem_targets(gamma1, gamma2);
        Ok((
            Self::new(ControlChannel::Difference, 1.0, ta, horizon)?,
            Self::new(ControlChannel::Sum, -1.0, tb, horizon)?,
        ))
    }

    pub fn target(&self) -> Unitary2 {
        rx(self.target_angle)
    }
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Quaternion `(q0, qx, qy, qz)` with `U ∝ q0 I − i q·σ`.
fn su2_quaternion(u: &Unitary2) -> [f64; 4] {
    let m = u.matrix();
    let root = m.determinant().sqrt();
    let v = m.scale(root.inv());
    let (u00, u01, u10, u11) = (v.0[0][0], v.0[0][1], v.0[1][0], v.0[1][1]);
    [
        0.5 * (u00 + u11).re,
        -0.5 * (u01 + u10).im,
        0.5 * (u10 - u01).re,
        0.5 * (u11 - u00).im,
    ]
}

const GIMBAL_TOL: f64 = 1e-14;

/// Generic proper-Euler extraction `U ≃ R_p(α) R_q(β) R_p(γ)` where
/// `(p, q, r)` is a cyclic permutation of `(x, y, z)`; `comps` lists the
/// quaternion components along `(p, q, r)`.
fn proper_euler(q0: f64, comps: [f64; 3]) -> (f64, f64, f64) {
    let [qp, qq, qr] = comps;
    let cb = q0.hypot(qp);
    let sb = qq.hypot(qr);
    let beta = 2.0 * sb.atan2(cb);
    let sum = qp.atan2(q0);
    let diff = qr.atan2(qq);
    let (alpha, gamma) = if sb <= GIMBAL_TOL {
        (2.0 * sum, 0.0)
    } else if cb <= GIMBAL_TOL {
        (2.0 * diff, 0.0)
    } else {
        (sum + diff, sum - diff)
    };
    (wrap_angle(alpha), beta, wrap_angle(gamma))
}

/// Angles `(α, β, γ)` with `U ≃ e^{−iασx/2} e^{−iβσy/2} e^{−iγσx/2}` up to a
/// global phase; `β ∈ [0, π]`, `α, γ ∈ (−π, π]`, and `γ = 0` when `β ∈ {0, π}`.
pub fn euler_xyx(u: &Unitary2) -> (f64, f64, f64) {
    let [q0, qx, qy, qz] = su2_quaternion(u);
    proper_euler(q0, [qx, qy, qz])
}

/// Angles `(α1, α2, α3)` with `U ≃ e^{−iα1σz/2} e^{−iα2σx/2} e^{−iα3σz/2}`.
pub fn euler_zxz(u: &Unitary2) -> (f64, f64, f64) {
    let [q0, qx, qy, qz] = su2_quaternion(u);
    proper_euler(q0, [qz, qx, qy])
}

pub fn xyx_compose(alpha: f64, beta: f64, gamma: f64) -> Unitary2 {
    su2_rotation([alpha, 0.0, 0.0]) * su2_rotation([0.0, beta, 0.0]) * su2_rotation([gamma, 0.0, 0.0])
}

pub fn zxz_compose(a1: f64, a2: f64, a3: f64) -> Unitary2 {
    su2_rotation([0.0, 0.0, a1]) * su2_rotation([a2, 0.0, 0.0]) * su2_rotation([0.0, 0.0, a3])
}

/// One stage of the XYX plan: both qubits rotate about the in-plane axis at
/// angle `phase` from x, by `angles.0` and `angles.1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub phase: f64,
    pub angles: (f64, f64),
}

impl Stage {
    pub fn is_identity(&self) -> bool {
        self.angles.0 == 0.0 && self.angles.1 == 0.0
    }

    /// The local unitary this stage implements.
    pub fn target(&self) -> Unitary4 {
        let (s, c) = self.phase.sin_cos();
        let r = |a: f64| su2_rotation([a * c, a * s, 0.0]);
        r(self.angles.0).kron(&r(self.angles.1))
    }
}

/// Three stages realizing `k1 = (Rx⊗Rx)(Ry⊗Ry)(Rx⊗Rx)`; stages run in order,
/// so stage 0 is the rightmost factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StagePlan {
    pub stages: [Stage; 3],
}

/// Stage phases `(0, π/2, 0)`.
pub const STAGE_PHASES: [f64; 3] = [0.0, FRAC_PI_2, 0.0];

pub fn stage_plan(first: &Unitary2, second: &Unitary2) -> StagePlan {
    let (a1, b1, g1) = euler_xyx(first);
    let (a2, b2, g2) = euler_xyx(second);
    StagePlan {
        stages: [
            Stage { phase: STAGE_PHASES[0], angles: (g1, g2) },
            Stage { phase: STAGE_PHASES[1], angles: (b1, b2) },
            Stage { phase: STAGE_PHASES[2], angles: (a1, a2) },
        ],
    }
}

impl StagePlan {
    /// Product of the stage targets, last stage leftmost.
    pub fn compose(&self) -> Unitary4 {
        self.stages
            .iter()
            .fold(Unitary::identity(), |acc, s| s.target() * acc)
    }
}

/// `V = e^{iπσz/4} ⊗ e^{iπσz/4}`, with `H2 = V† H1 V` for the π/2-phase stage.
pub fn phase_frame() -> Unitary4 {
    let v = su2_rotation([0.0, 0.0, -FRAC_PI_2]);
    v.kron(&v)
}
