//! Phase estimation with the ring, and the register algorithm it mirrors.
//!
//! The ring pipeline prepares a localized particle, lets it evolve for one
//! return time and reads the angle of the revived peak. The register oracle
//! evaluates the textbook outcome distribution
//! `Pr(k) = |2^{-t} Σ_j e^{i(φ_u - 2πk/2^t) j}|²` so both read-outs can be
//! put on a common phase axis.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::abelian::{evolve, localized_state, return_time, shift_angle};
use crate::angle::{angle_difference, wrap, AngleGrid};
use crate::error::{invalid, Error, Result};
use crate::estimate::{argmax, locate_peak, PhaseEstimate};
use crate::state::{density_on_grid, RingConfig, WaveState};

pub const MAX_REGISTER_QUBITS: u32 = 20;

/// Register size and the eigenphase `φ_u ∈ [-π, π)` fed to the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegisterQpeSpec {
    t_qubits: u32,
    phase: f64,
}

impl RegisterQpeSpec {
    pub fn new(t_qubits: u32, phase: f64) -> Result<Self> {
        if !(1..=MAX_REGISTER_QUBITS).contains(&t_qubits) {
            return Err(invalid(
                "t_qubits",
                format!("must lie in 1..={MAX_REGISTER_QUBITS}, got {t_qubits}"),
            ));
        }
        if !phase.is_finite() {
            return Err(Error::NonFinite("phase"));
        }
        Ok(Self {
            t_qubits,
            phase: wrap(phase),
        })
    }

    pub fn t_qubits(&self) -> u32 {
        self.t_qubits
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn register_size(&self) -> usize {
        1 << self.t_qubits
    }

    /// Outcome `k` read as a phase, `2πk/2^t` wrapped to `[-π, π)`.
    pub fn outcome_phase(&self, k: usize) -> f64 {
        wrap(TAU * k as f64 / self.register_size() as f64)
    }

    /// Resolution `2π/2^t` of the register read-out.
    pub fn resolution(&self) -> f64 {
        TAU / self.register_size() as f64
    }
}

/// Outcome probabilities of the register algorithm, via the closed Dirichlet form.
pub fn register_qpe_distribution(spec: &RegisterQpeSpec) -> Vec<f64> {
    let size = spec.register_size();
    let n = size as f64;
    // phase in units of register bins
    let target = spec.phase / TAU * n;
    (0..size)
        .map(|k| {
            let x = (target - k as f64 + n / 2.0).rem_euclid(n) - n / 2.0;
            let den = (PI * x / n).sin();
            if den.abs() < 1e-300 {
                1.0
            } else {
                let num = (PI * x).sin();
                (num / (n * den)).powi(2)
            }
        })
        .collect()
}

/// Most likely register outcome; ties resolve to the smallest `k`.
pub fn register_peak(distribution: &[f64]) -> usize {
    argmax(distribution)
}

/// Runs the ring as a phase-estimation device.
///
/// The estimate targets `wrap(-2qΦ/ħ)`, the angle at which the localized
/// particle reappears after one return time.
pub fn ring_qpe(config: &RingConfig, l: usize, grid: &AngleGrid) -> Result<PhaseEstimate> {
    grid.require_resolves(l)?;
    let start = localized_state(l)?;
    let evolved = evolve(&start, config, return_time(config))?;
    let distribution = density_on_grid(&evolved.state, grid);
    let peak = locate_peak(grid, &distribution)?;
    Ok(PhaseEstimate {
        phase: peak.refined,
        grid_peak: peak.index,
        refined_peak: peak.refined,
        half_width: peak.half_width,
        distribution,
    })
}

/// Principal flux reproducing a measured shift: `Φ = -ħ·phase / 2q`.
///
/// The ring cannot tell apart fluxes differing by [`flux_alias_period`].
pub fn flux_from_phase(config: &RingConfig, phase: f64) -> Result<f64> {
    if config.charge() == 0.0 {
        return Err(Error::ZeroCharge);
    }
    if !phase.is_finite() {
        return Err(Error::NonFinite("phase"));
    }
    // + 0.0 folds a negative zero
    Ok(-config.hbar() * phase / (2.0 * config.charge()) + 0.0)
}

/// Flux period `πħ/|q|` over which the revival angle repeats.
pub fn flux_alias_period(config: &RingConfig) -> Result<f64> {
    if config.charge() == 0.0 {
        return Err(Error::ZeroCharge);
    }
    Ok(PI * config.hbar() / config.charge().abs())
}

/// Seeded position measurements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementSample {
    pub angles: Vec<f64>,
    pub seed: u64,
}

impl MeasurementSample {
    /// Counts per grid bin.
    pub fn histogram(&self, grid: &AngleGrid) -> Vec<usize> {
        let mut counts = vec![0; grid.size()];
        for &a in &self.angles {
            counts[grid.nearest_index(a)] += 1;
        }
        counts
    }

    /// Centre of the most populated bin.
    pub fn mode(&self, grid: &AngleGrid) -> f64 {
        let counts: Vec<f64> = self.histogram(grid).into_iter().map(|c| c as f64).collect();
        grid.point(argmax(&counts))
    }
}

/// Draws `n` angles from the bin-discretized position density by inverse CDF.
pub fn sample_positions(
    state: &WaveState,
    grid: &AngleGrid,
    n: usize,
    seed: u64,
) -> Result<MeasurementSample> {
    if n < 1 {
        return Err(invalid("samples", "need at least one sample"));
    }
    let density = density_on_grid(state, grid);
    let mut cdf = Vec::with_capacity(density.len());
    let mut acc = 0.0;
    for d in &density {
        acc += d.max(0.0);
        cdf.push(acc);
    }
    if !(acc > 0.0) || !acc.is_finite() {
        return Err(Error::DegenerateDensity);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angles = (0..n)
        .map(|_| {
            let u = rng.random::<f64>() * acc;
            let i = cdf.partition_point(|&c| c <= u).min(grid.size() - 1);
            grid.point(i)
        })
        .collect();
    Ok(MeasurementSample { angles, seed })
}

/// Ring and register read-outs of the same eigenphase on a common axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RingRegisterComparison {
    /// `φ_u = wrap(shift_angle(config))` fed to the register.
    pub expected_phase: f64,
    pub ring_phase: f64,
    pub register_outcome: usize,
    pub register_phase: f64,
    /// Circular distance between the two peaks.
    pub difference: f64,
    /// `max(2π/2^t, 2π/G)`.
    pub tolerance: f64,
    #[serde(skip)]
    pub ring: PhaseEstimate,
    #[serde(skip)]
    pub register_distribution: Vec<f64>,
}

impl RingRegisterComparison {
    pub fn agrees(&self) -> bool {
        self.difference <= self.tolerance
    }
}

pub fn compare_ring_vs_register(
    config: &RingConfig,
    l: usize,
    t_qubits: u32,
    grid: &AngleGrid,
) -> Result<RingRegisterComparison> {
    let expected = wrap(shift_angle(config));
    let spec = RegisterQpeSpec::new(t_qubits, expected)?;
    let register_distribution = register_qpe_distribution(&spec);
    let k = register_peak(&register_distribution);
    let ring = ring_qpe(config, l, grid)?;
    let register_phase = spec.outcome_phase(k);
    Ok(RingRegisterComparison {
        expected_phase: expected,
        ring_phase: ring.phase,
        register_outcome: k,
        register_phase,
        difference: angle_difference(ring.phase, register_phase).abs(),
        tolerance: spec.resolution().max(grid.spacing()),
        ring,
        register_distribution,
    })
}
