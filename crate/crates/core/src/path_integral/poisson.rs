use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::state::RingConfig;

/// Both sides of one Poisson-resummed time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonCheck {
    /// `(1/2π) Σ_{|m|≤l} e^{-i(ħ/2m_q r²)(m - α)²τ + iΔφ m}`.
    pub lhs: Complex64,
    /// `√(m_q r²/2πiħτ) Σ_{|n|≤n_max} e^{i(m_q r²/2ħ)(Δφ+2πn)²/τ + i(Δφ+2πn)α}`.
    pub rhs: Complex64,
    pub relative_difference: f64,
}

fn regulated(dt: f64, eta: f64) -> Result<Complex64> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(invalid("dt", format!("must be finite and > 0, got {dt}")));
    }
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::Regulator(eta));
    }
    Ok(Complex64::new(dt, -eta))
}

/// Winding-`n` term of the configuration-space side, without prefactor.
pub fn winding_term(
    config: &RingConfig,
    dt: f64,
    dphi: f64,
    n: i64,
    eta: f64,
) -> Result<Complex64> {
    let tau = regulated(dt, eta)?;
    Ok(term(config, tau, dphi, n))
}

fn term(config: &RingConfig, tau: Complex64, dphi: f64, n: i64) -> Complex64 {
    let x = dphi + TAU * n as f64;
    let k = config.inertia() / (2.0 * config.hbar());
    (Complex64::new(0.0, k * x * x) / tau + Complex64::new(0.0, x * config.flux_quanta())).exp()
}

/// `max(|term(+1)|, |term(-1)|) / |term(0)|`.
pub fn winding_dominance(config: &RingConfig, dt: f64, dphi: f64, eta: f64) -> Result<f64> {
    let tau = regulated(dt, eta)?;
    let t0 = term(config, tau, dphi, 0).norm();
    let t1 = term(config, tau, dphi, 1)
        .norm()
        .max(term(config, tau, dphi, -1).norm());
    Ok(t1 / t0)
}

/// Evaluates the momentum sum of one time step and its winding-sum dual
/// with exact prefactors, both at the regulated time `δt - iη`.
pub fn poisson_step_check(
    config: &RingConfig,
    dt: f64,
    dphi: f64,
    l: usize,
    n_max: usize,
    eta: f64,
) -> Result<PoissonCheck> {
    let tau = regulated(dt, eta)?;
    if !dphi.is_finite() {
        return Err(Error::NonFinite("dphi"));
    }
    let w = config.rotor_frequency();
    let alpha = config.flux_quanta();
    let lhs = (-(l as i64)..=l as i64)
        .map(|m| {
            let d = m as f64 - alpha;
            (Complex64::new(0.0, -w * d * d) * tau + Complex64::new(0.0, dphi * m as f64)).exp()
        })
        .sum::<Complex64>()
        / TAU;
    let prefactor = (Complex64::new(config.inertia(), 0.0)
        / (Complex64::new(0.0, TAU * config.hbar()) * tau))
        .sqrt();
    let n = n_max as i64;
    let rhs = prefactor
        * (-n..=n)
            .map(|k| term(config, tau, dphi, k))
            .sum::<Complex64>();
    Ok(PoissonCheck {
        lhs,
        rhs,
        relative_difference: (lhs - rhs).norm() / rhs.norm(),
    })
}
