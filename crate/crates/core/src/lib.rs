//! Simulator for a charged particle on a ring threaded by an
//! Aharonov-Bohm flux, viewed as a physical phase-estimation device.
//!
//! - [`state`]: ring constants, truncated angular-momentum states, position densities.
//! - [`abelian`]: exact evolution with a U(1) flux, return time and revival shift.
//! - [`qpe`]: the ring read-out pipeline next to a textbook register oracle.
//! - [`nonabelian`]: U(N) holonomies, spinor evolution and the full estimation.
//! - [`path_integral`]: discretized phase-space and configuration-space
//!   propagators, the stationary path and the small-ħ interference scan.

// `!(x > 0.0)` rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abelian;
pub mod angle;
pub mod error;
pub mod estimate;
pub mod nonabelian;
pub mod path_integral;
pub mod qpe;
pub mod state;

pub use abelian::{
    angular_velocity, energy, evolve, localized_state, return_time, rotate, shift_angle,
    shift_identity_residual, EvolutionResult,
};
pub use angle::{angle_difference, wrap_angle, AngleGrid};
pub use error::{Error, Result};
pub use estimate::PhaseEstimate;
pub use state::{
    density_on_grid, inner, position_amplitude, wavefunction_on_grid, RingConfig, WaveState,
};

pub use num_complex::Complex64;
