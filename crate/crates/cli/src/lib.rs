//! Library side of the `pulseforge` binary: configuration, file formats and
//! the subcommands, exposed for integration tests.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod pulses;
pub mod run;
