//! Complex 2×2/4×4 algebra, closed-form SU(2) exponentials, time-ordered
//! propagation and phase-invariant fidelity.

pub mod linalg;
mod matrix;
mod propagate;

pub use matrix::{pauli, Matrix, Matrix2, Matrix4, Unitary, Unitary2, Unitary4, C64, UNITARITY_TOL};
pub use propagate::{
    expm_hermitian4, expm_su2, gate_fidelity, gate_fidelity_dyn, propagate2, propagate4, rx, ry,
    rz, signed_overlap, Hamiltonian2, Hamiltonian4Params,
};
pub(crate) use matrix::ZERO;
pub(crate) use propagate::su2_rotation;
