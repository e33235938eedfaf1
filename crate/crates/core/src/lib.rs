//! Single-qubit gate synthesis for two qubits with an always-on ZZ coupling.
//!
//! The coupled Hamiltonian
//!
//! ```text
//! H = ω1/2 (cos φ1 σx + sin φ1 σy)⊗I + ω2/2 I⊗(cos φ2 σx + sin φ2 σy) + J/2 σz⊗σz
//! ```
//!
//! generates (for fixed phases) a Lie algebra isomorphic to su(2)⊕su(2). The
//! [`decouple`] module makes that explicit, reducing the synthesis of a local
//! gate to two independent single-qubit steering problems
//! `i U' = (ω σx/2 ± J σy/2) U`, which [`synth`] solves with several control
//! strategies. [`verify`] re-simulates every result on the full 4×4 system.
//!
//! All frequencies are angular (rad/s).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod decouple;
pub mod elliptic;
pub mod error;
pub mod liepoisson;
pub mod optimize;
pub mod synth;
pub mod verify;

pub use error::{Error, Result};
