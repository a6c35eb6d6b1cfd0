//! Discrete-time coined quantum walks on ultrafast time bins.
//!
//! The walker is a single photon whose polarization (H/V) is the coin and
//! whose arrival-time bin is the position. Each step applies a programmable
//! coin and then delays the V component by one bin. Around the walk itself
//! the crate models input preparation, the Kerr-gate delay-scan readout, and
//! the usual figures of merit (fidelity, distance, variance, loss budget,
//! drift stability).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail these checks

extern crate alloc;

pub mod analysis;
pub mod error;
pub mod kerr;
pub mod operators;
pub mod prepare;
pub mod state;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use operators::{
    apply_coin, apply_shift, apply_step, coin_matrix, dense_walk_oracle, evolve, CoinMatrix,
    CoinParams, StepConfig, StepSchedule,
};
pub use prepare::{prepare, InputSpec};
pub use state::{BinGrid, Distribution, Polarization, Tolerances, WalkerState};
