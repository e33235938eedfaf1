//! Ground truth for synthesized programs: simulation on the full two-qubit
//! Hamiltonian, d = 4 fidelity and a locality certificate.

use serde::{Deserialize, Serialize};

use crate::algebra::linalg::{polar_unitary, svd};
use crate::algebra::{gate_fidelity, propagate4, Hamiltonian4Params, Matrix2, Matrix4, Unitary, Unitary2, Unitary4, C64};
use crate::error::{Error, Result};
use crate::synth::{for_each_piece, qubit_energies, PulseProgram, StageOutcome, Strategy, Synthesis};

/// Version of the report layout.
pub const REPORT_SCHEMA: u32 = 1;

/// Stage propagators composed in order, each integrated with `steps`
/// midpoint steps split at the stage's discontinuities.
pub fn simulate_program(program: &PulseProgram, coupling: f64, steps: usize) -> Result<Unitary4> {
    if !coupling.is_finite() {
        return Err(Error::invalid("coupling must be finite"));
    }
    if steps == 0 {
        return Err(Error::invalid("steps must be ≥ 1"));
    }
    let mut u = Unitary::identity();
    for (index, stage) in program.stages.iter().enumerate() {
        let mut failure = None;
        for_each_piece(stage.duration, &stage.breakpoints(), steps, |start, len, n| {
            if failure.is_some() {
                return;
            }
            let params = |t: f64| Hamiltonian4Params {
                omega1: stage.omega1.eval(start + t),
                omega2: stage.omega2.eval(start + t),
                phi1: stage.phi1,
                phi2: stage.phi2,
                coupling,
            };
            match propagate4(params, len, n) {
                Ok(piece) => u = piece * u,
                Err(e) => failure = Some(e),
            }
        });
        if let Some(e) = failure {
            return Err(e.in_stage(index));
        }
    }
    Ok(u)
}

/// `M[(i,j),(k,l)] = U[(i,k),(j,l)]`: rank one iff `U = A⊗B`.
fn realign(u: &Unitary4) -> Matrix4 {
    let m = u.matrix();
    Matrix4::from_fn(|r, c| {
        let (i, j) = (r / 2, r % 2);
        let (k, l) = (c / 2, c % 2);
        m.0[2 * i + k][2 * j + l]
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Locality {
    /// `σ2/σ1` of the realigned matrix.
    pub residual: f64,
    /// Nearest product factors, each polar-projected; `None` when a leading
    /// singular vector does not reshape to an invertible matrix.
    pub nearest: Option<(Unitary2, Unitary2)>,
}

pub fn locality_residual(u: &Unitary4) -> Locality {
    let d = svd(&realign(u));
    let s = d.singular_values;
    let residual = if s[0] > 0.0 { s[1] / s[0] } else { 0.0 };
    // R ≈ σ1 u1 v1†, so A ∝ reshape(u1) and B ∝ reshape(conj v1).
    let a = Matrix2::from_fn(|i, j| d.u.0[2 * i + j][0]);
    let b = Matrix2::from_fn(|k, l| d.v.0[2 * k + l][0].conj());
    let nearest = polar_unitary(&a).zip(polar_unitary(&b));
    Locality { residual, nearest }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetRecord {
    pub description: String,
    pub first: Unitary2,
    pub second: Unitary2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub qubit1: f64,
    pub qubit2: f64,
    pub total: f64,
}

/// Field order is the serialized key order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub schema: u32,
    pub target: TargetRecord,
    pub strategy: Option<Strategy>,
    pub coupling: f64,
    pub steps: usize,
    pub fidelity: f64,
    pub duration: f64,
    pub energy: EnergyRecord,
    pub locality_residual: f64,
    pub nearest_factors: Option<(Unitary2, Unitary2)>,
    pub stages: Vec<StageOutcome>,
}

/// Simulate `program` and score it against `first ⊗ second`.
pub fn make_report(
    first: &Unitary2,
    second: &Unitary2,
    description: impl Into<String>,
    program: &PulseProgram,
    coupling: f64,
    steps: usize,
) -> Result<SynthesisReport> {
    let u = simulate_program(program, coupling, steps)?;
    let target = first.kron(second);
    let locality = locality_residual(&u);
    let (e1, e2) = qubit_energies(program);
    Ok(SynthesisReport {
        schema: REPORT_SCHEMA,
        target: TargetRecord { description: description.into(), first: *first, second: *second },
        strategy: None,
        coupling,
        steps,
        fidelity: gate_fidelity(&u, &target),
        duration: program.duration(),
        energy: EnergyRecord { qubit1: e1, qubit2: e2, total: e1 + e2 },
        locality_residual: locality.residual,
        nearest_factors: locality.nearest,
        stages: vec![],
    })
}

impl SynthesisReport {
    /// Report for a synthesis, with its strategy and stage records attached.
    pub fn from_synthesis(
        first: &Unitary2,
        second: &Unitary2,
        description: impl Into<String>,
        synthesis: &Synthesis,
        coupling: f64,
        steps: usize,
    ) -> Result<Self> {
        let mut report = make_report(first, second, description, &synthesis.program, coupling, steps)?;
        report.strategy = Some(synthesis.strategy);
        report.stages = synthesis.stages.clone();
        Ok(report)
    }

    /// Product of the per-stage block fidelities; the coupled fidelity should
    /// not fall below it by more than integration error.
    pub fn block_fidelity_product(&self) -> f64 {
        self.stages.iter().map(|s| s.block_fidelity).product()
    }
}

/// Entries of a unitary as a flat row-major list, for callers that need
/// runtime dimensions.
pub fn flatten<const N: usize>(u: &Unitary<N>) -> Vec<C64> {
    u.matrix().0.iter().flatten().copied().collect()
}
