//! Core algorithms for Lie-bracket approximation of control-affine systems.
//!
//! The crate is `no_std` and only needs `alloc`. It covers the free algebra
//! kernel, oscillatory input generators, vector fields with nested
//! derivative oracles, a fixed-step integrator, stability probes and the two
//! built-in scenarios (linear extremum seeking and unicycle formations).
#![cfg_attr(not(test), no_std)]
#![warn(missing_debug_implementations, rust_2018_idioms)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod free_algebra;
pub mod input_signals;
pub mod math;
pub mod scenarios;
pub mod simulator;
pub mod stability_lab;
pub mod vector_fields;

pub use free_algebra::{AlgebraError, MultiIndex, NcPolynomial};
