use std::f64::consts::PI;

use super::{Path, PathSpec};
use crate::error::{invalid, Error, Result};
use crate::state::RingConfig;

/// Discretized configuration-space action
/// `A = Σ_j [ (m_q r²/2)(φ_j - φ_{j-1})²/δt + (φ_j - φ_{j-1}) qΦ/2π ]`.
pub fn action(path: &Path, config: &RingConfig, spec: &PathSpec) -> Result<f64> {
    if path.steps() != spec.steps() {
        return Err(Error::ShapeMismatch(format!(
            "path has {} steps, PathSpec expects {}",
            path.steps(),
            spec.steps()
        )));
    }
    let dt = spec.time_step(config);
    let kinetic = 0.5 * config.inertia() / dt;
    let coupling = config.charge() * config.flux() / (2.0 * PI);
    Ok(path
        .angles
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            kinetic * d * d + coupling * d
        })
        .sum())
}

/// Constant-step path from `spec.start()` to `spec.end()`.
///
/// The flux term only depends on the endpoints, so this is the minimizer of
/// the action for any fixed endpoints. For [`PathSpec::revival`] the step is
/// `-(qΦ/2πħ)(ħ/m_q r²)δt` and the slope equals `-ω_Φ`.
pub fn minimizing_path(_config: &RingConfig, spec: &PathSpec) -> Result<Path> {
    let n = spec.steps();
    let step = (spec.end() - spec.start()) / n as f64;
    let mut angles: Vec<f64> = (0..=n).map(|j| spec.start() + step * j as f64).collect();
    angles[n] = spec.end();
    Path::new(angles)
}

/// `+ε` for the first `N/2` increments and `-ε` for the rest.
pub fn tent_perturbation(steps: usize, epsilon: f64) -> Result<Vec<f64>> {
    if steps == 0 || !steps.is_multiple_of(2) {
        return Err(invalid(
            "steps",
            format!("tent family needs an even step count, got {steps}"),
        ));
    }
    Ok((0..steps)
        .map(|j| if j < steps / 2 { epsilon } else { -epsilon })
        .collect())
}

/// Action cost `ħ N Σ ε_j² / 8π` of perturbing the increments by `ε_j`.
pub fn tent_cost(config: &RingConfig, perturbation: &[f64]) -> f64 {
    let n = perturbation.len() as f64;
    config.hbar() * n * perturbation.iter().map(|e| e * e).sum::<f64>() / (8.0 * PI)
}

pub(crate) fn perturbed(min: &Path, perturbation: &[f64]) -> Result<Path> {
    let inc: Vec<f64> = min
        .increments()
        .iter()
        .zip(perturbation)
        .map(|(d, e)| d + e)
        .collect();
    Path::from_increments(min.angles[0], &inc)
}

/// `|A(min + ε) - A(min) - ħNΣε²/8π|` for increments perturbed by `ε`.
///
/// The action is exactly quadratic and its linear term vanishes at the
/// minimizer, so this is pure roundoff.
pub fn linear_term_residual(
    config: &RingConfig,
    spec: &PathSpec,
    perturbation: &[f64],
) -> Result<f64> {
    if perturbation.len() != spec.steps() {
        return Err(Error::ShapeMismatch(format!(
            "{} increments for {} steps",
            perturbation.len(),
            spec.steps()
        )));
    }
    if perturbation.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFinite("perturbation"));
    }
    let sum: f64 = perturbation.iter().sum();
    let scale: f64 = perturbation.iter().map(|e| e.abs()).sum();
    if sum.abs() > 1e-12 * scale.max(1.0) {
        return Err(Error::EndpointConstraint { sum });
    }
    let min = minimizing_path(config, spec)?;
    let base = action(&min, config, spec)?;
    let moved = action(&perturbed(&min, perturbation)?, config, spec)?;
    Ok((moved - base - tent_cost(config, perturbation)).abs())
}
