use std::f64::consts::PI;

use serde::Serialize;

use super::action::{action, minimizing_path, perturbed, tent_perturbation};
use super::PathSpec;
use crate::abelian::return_time;
use crate::error::{invalid, Result};
use crate::state::RingConfig;

/// One `ħ` value of the classical-limit scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub hbar: f64,
    pub return_time: f64,
    /// Measured `ΔA/ħ` of the tent of height `ε` (prediction `N²ε²/8π`).
    pub tent_cost: f64,
    /// Largest tent increment with `ΔA/ħ ≤ 1`.
    pub critical_step: f64,
    /// Largest distance from the minimizing path reached by that tent.
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalScan {
    pub steps: usize,
    pub epsilon: f64,
    pub rows: Vec<ScanRow>,
}

impl ClassicalScan {
    /// `√(8π)/2`, the ħ- and N-independent reach of the tent family.
    pub fn predicted_deviation() -> f64 {
        (8.0 * PI).sqrt() / 2.0
    }
}

/// For each `ħ`, measures how far a tent-shaped detour can stray from the
/// minimizing path before its action cost `ΔA/ħ` exceeds one.
pub fn classical_limit_scan(
    base: &RingConfig,
    hbar_values: &[f64],
    steps: usize,
    epsilon: f64,
) -> Result<ClassicalScan> {
    if hbar_values.is_empty() {
        return Err(invalid("hbar_values", "empty scan"));
    }
    if hbar_values.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
        return Err(invalid("hbar_values", "all values must be finite and > 0"));
    }
    if hbar_values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("hbar_values", "must be strictly descending"));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(invalid(
            "epsilon",
            format!("must be finite and > 0, got {epsilon}"),
        ));
    }
    let tent = tent_perturbation(steps, epsilon)?;
    let mut rows = Vec::with_capacity(hbar_values.len());
    for &hbar in hbar_values {
        let cfg = base.with_hbar(hbar)?;
        let spec = PathSpec::revival(&cfg, steps)?;
        let min = minimizing_path(&cfg, &spec)?;
        let a0 = action(&min, &cfg, &spec)?;
        let cost = (action(&perturbed(&min, &tent)?, &cfg, &spec)? - a0) / hbar;
        // the cost is quadratic in the tent height
        let critical = epsilon / cost.sqrt();
        let reach = perturbed(&min, &tent_perturbation(steps, critical)?)?.max_deviation(&min);
        rows.push(ScanRow {
            hbar,
            return_time: return_time(&cfg),
            tent_cost: cost,
            critical_step: critical,
            max_deviation: reach,
        });
    }
    Ok(ClassicalScan {
        steps,
        epsilon,
        rows,
    })
}
