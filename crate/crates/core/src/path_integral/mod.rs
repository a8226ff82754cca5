//! Discretized path integrals for one return time of the ring.
//!
//! `[0, t_R]` is split into `N` steps of `δt = t_R/N`. Inserting complete
//! sets of angular-momentum and angle states gives the phase-space form,
//! which is exact at any `N`. Poisson-resumming each momentum sum turns it
//! into a sum over windings of an oscillatory Gaussian in the angle step:
//! the configuration-space form with action
//! `A = Σ_j [ (m_q r²/2)(Δφ_j)²/δt + Δφ_j qΦ/2π ]`.
//!
//! Oscillatory sums and integrals are made absolutely convergent by the
//! Fresnel regulator `δt → δt - iη`, applied to both sides of every
//! comparison.

mod action;
mod poisson;
mod propagator;
mod scan;

pub use action::{action, linear_term_residual, minimizing_path, tent_cost, tent_perturbation};
pub use poisson::{poisson_step_check, winding_dominance, winding_term, PoissonCheck};
pub use propagator::{
    config_space_propagator, phase_space_propagator, spectral_propagator, ConfigSpaceFit,
    Propagator,
};
pub use scan::{classical_limit_scan, ClassicalScan, ScanRow};

use serde::Serialize;

use crate::abelian::{return_time, shift_angle};
use crate::angle::AngleGrid;
use crate::error::{invalid, Error, Result};
use crate::state::RingConfig;

/// Default Fresnel regulator as a fraction of the time step.
pub const DEFAULT_REGULATOR: f64 = 1e-3;

/// Time slicing, endpoints and truncations for a path-integral evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathSpec {
    steps: usize,
    start: f64,
    end: f64,
    momentum_cutoff: usize,
    winding_cutoff: usize,
    grid: AngleGrid,
    /// `η/δt`.
    regulator: f64,
}

impl PathSpec {
    /// `steps` slices from `φ_0 = 0` to `end`, with `l = 6`, `n_max = 3`,
    /// a 128-point grid and `η = 1e-3·δt`.
    pub fn new(steps: usize, end: f64) -> Result<Self> {
        if steps < 1 {
            return Err(invalid("steps", "need at least one time step"));
        }
        if !end.is_finite() {
            return Err(Error::NonFinite("end angle"));
        }
        Ok(Self {
            steps,
            start: 0.0,
            end,
            momentum_cutoff: 6,
            winding_cutoff: 3,
            grid: AngleGrid::new(128)?,
            regulator: DEFAULT_REGULATOR,
        })
    }

    /// Ends at the revival angle `φ_Φ = -2qΦ/ħ` (unwrapped).
    pub fn revival(config: &RingConfig, steps: usize) -> Result<Self> {
        Self::new(steps, shift_angle(config))
    }

    pub fn with_start(mut self, start: f64) -> Result<Self> {
        if !start.is_finite() {
            return Err(Error::NonFinite("start angle"));
        }
        self.start = start;
        Ok(self)
    }

    pub fn with_momentum_cutoff(mut self, l: usize) -> Result<Self> {
        if l < 1 {
            return Err(invalid("momentum_cutoff", "must be at least 1"));
        }
        self.momentum_cutoff = l;
        Ok(self)
    }

    pub fn with_winding_cutoff(mut self, n_max: usize) -> Self {
        self.winding_cutoff = n_max;
        self
    }

    pub fn with_grid(mut self, grid: AngleGrid) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_regulator(mut self, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0) || !fraction.is_finite() {
            return Err(Error::Regulator(fraction));
        }
        self.regulator = fraction;
        Ok(self)
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn momentum_cutoff(&self) -> usize {
        self.momentum_cutoff
    }

    pub fn winding_cutoff(&self) -> usize {
        self.winding_cutoff
    }

    pub fn grid(&self) -> &AngleGrid {
        &self.grid
    }

    pub fn regulator(&self) -> f64 {
        self.regulator
    }

    /// `δt = t_R / N`.
    pub fn time_step(&self, config: &RingConfig) -> f64 {
        return_time(config) / self.steps as f64
    }
}

/// Unwrapped angles `φ_0, …, φ_N` of a time-sliced path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Path {
    pub angles: Vec<f64>,
}

impl Path {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.len() < 2 {
            return Err(invalid("path", "need at least two points"));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("path angle"));
        }
        Ok(Self { angles })
    }

    pub fn steps(&self) -> usize {
        self.angles.len() - 1
    }

    /// Path whose `j`-th increment is `increments[j]`, starting at `start`.
    pub fn from_increments(start: f64, increments: &[f64]) -> Result<Self> {
        let mut angles = Vec::with_capacity(increments.len() + 1);
        let mut phi = start;
        angles.push(phi);
        for d in increments {
            phi += d;
            angles.push(phi);
        }
        Self::new(angles)
    }

    pub fn increments(&self) -> Vec<f64> {
        self.angles.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Largest `|φ_j - other_j|`.
    pub fn max_deviation(&self, other: &Path) -> f64 {
        self.angles
            .iter()
            .zip(&other.angles)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
