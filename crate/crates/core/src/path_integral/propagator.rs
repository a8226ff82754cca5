use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use super::PathSpec;
use crate::angle::AngleGrid;
use crate::error::{Error, Result};
use crate::state::RingConfig;

const PHASE_SPACE_MAX_STEPS: usize = 6;
const PHASE_SPACE_MAX_CUTOFF: usize = 12;
const PHASE_SPACE_MAX_GRID: usize = 256;
const CONFIG_SPACE_MAX_STEPS: usize = 5;
/// Quadrature nodes per unwrapped dimension.
const CONFIG_SPACE_MAX_NODES: usize = 8192;

/// Amplitude `⟨φ|e^{-iHt/ħ}|φ_0⟩` sampled at the grid angles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Propagator {
    pub angles: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl Propagator {
    /// `‖self - other‖ / ‖other‖` over the sampled angles.
    pub fn relative_l2(&self, other: &Propagator) -> f64 {
        let num: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = other.values.iter().map(|b| b.norm_sqr()).sum();
        (num / den).sqrt()
    }
}

/// Truncated spectral kernel
/// `K(φ) = (1/2π) Σ_{|m|≤l} e^{-iE_m τ/ħ} e^{im(φ - φ_0)}`
/// for a possibly complex (regulated) elapsed time `τ`.
pub fn spectral_propagator(
    config: &RingConfig,
    l: usize,
    elapsed: Complex64,
    start: f64,
    angles: &[f64],
) -> Propagator {
    let w = config.rotor_frequency();
    let alpha = config.flux_quanta();
    let weights: Vec<(f64, Complex64)> = (-(l as i64)..=l as i64)
        .map(|m| {
            let d = m as f64 - alpha;
            (m as f64, (Complex64::new(0.0, -w * d * d) * elapsed).exp())
        })
        .collect();
    let values = angles
        .iter()
        .map(|phi| {
            weights
                .iter()
                .map(|(m, wm)| wm * Complex64::cis(m * (phi - start)))
                .sum::<Complex64>()
                / TAU
        })
        .collect();
    Propagator {
        angles: angles.to_vec(),
        values,
    }
}

/// Phase-space path integral: `N` short-time transfer operators
/// `T(φ', φ) = (1/2π) Σ_{|m|≤l} e^{-iE_m δt/ħ} e^{im(φ' - φ)}` contracted
/// with trapezoid quadrature over the intermediate angles.
///
/// With `G > 2l` the quadrature is exact for these trigonometric
/// polynomials and the result equals the spectral kernel at any `N`.
pub fn phase_space_propagator(config: &RingConfig, spec: &PathSpec) -> Result<Propagator> {
    let (n, l, g) = (spec.steps(), spec.momentum_cutoff(), spec.grid().size());
    if n > PHASE_SPACE_MAX_STEPS {
        return Err(Error::CostGuard(format!(
            "steps {n} > {PHASE_SPACE_MAX_STEPS}"
        )));
    }
    if l > PHASE_SPACE_MAX_CUTOFF {
        return Err(Error::CostGuard(format!(
            "momentum cutoff {l} > {PHASE_SPACE_MAX_CUTOFF}"
        )));
    }
    if g > PHASE_SPACE_MAX_GRID {
        return Err(Error::CostGuard(format!(
            "grid {g} > {PHASE_SPACE_MAX_GRID}"
        )));
    }
    let grid = spec.grid();
    let angles: Vec<f64> = grid.points().collect();
    let dt = Complex64::new(spec.time_step(config), 0.0);

    // first step from the fixed start angle
    let mut v = spectral_propagator(config, l, dt, spec.start(), &angles).values;
    if n > 1 {
        // T depends only on the grid offset (i' - i) mod G
        let offsets: Vec<f64> = (0..g).map(|d| d as f64 * grid.spacing()).collect();
        let kernel = spectral_propagator(config, l, dt, 0.0, &offsets).values;
        let h = grid.spacing();
        for _ in 1..n {
            v = (0..g)
                .map(|i| {
                    (0..g)
                        .map(|k| kernel[(i + g - k) % g] * v[k])
                        .sum::<Complex64>()
                        * h
                })
                .collect();
        }
    }
    Ok(Propagator { angles, values: v })
}

/// Brute-force configuration-space kernel compared with the regulated
/// spectral kernel up to one fitted complex constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigSpaceFit {
    /// `∫ dφ_1…dφ_{N-1} e^{iA/ħ}` summed over end windings, no prefactors.
    pub config_space: Propagator,
    /// Spectral kernel at elapsed time `N(δt - iη)`.
    pub exact: Propagator,
    /// Least-squares `c` minimizing `‖c·K_cfg - K_exact‖`.
    pub constant: Complex64,
    /// The dropped Gaussian normalization `(m_q r²/2πiħτ)^{N/2}`.
    pub analytic_constant: Complex64,
    pub residual: f64,
}

/// Configuration-space path integral by direct quadrature.
///
/// Intermediate angles are unwrapped reals on
/// `[-(2n_max+1)π, (2n_max+1)π)` sampled with the grid's spacing; the end
/// angle is summed over windings `|w| ≤ n_max`. Each step carries
/// `exp(i(m_q r²/2ħ)Δφ²/τ + iΔφ qΦ/2πħ)` with `τ = δt - iη`.
pub fn config_space_propagator(config: &RingConfig, spec: &PathSpec) -> Result<ConfigSpaceFit> {
    let n = spec.steps();
    if n > CONFIG_SPACE_MAX_STEPS {
        return Err(Error::CostGuard(format!(
            "steps {n} > {CONFIG_SPACE_MAX_STEPS}"
        )));
    }
    let grid: &AngleGrid = spec.grid();
    let windings = spec.winding_cutoff() as i64;
    let h = grid.spacing();
    let nodes = (2 * windings as usize + 1) * grid.size();
    if nodes > CONFIG_SPACE_MAX_NODES {
        return Err(Error::CostGuard(format!(
            "{nodes} quadrature nodes per dimension > {CONFIG_SPACE_MAX_NODES}"
        )));
    }
    let dt = spec.time_step(config);
    let eta = spec.regulator() * dt;
    if !(eta > 0.0) {
        return Err(Error::Regulator(eta));
    }
    let tau = Complex64::new(dt, -eta);
    let stiffness = Complex64::new(0.0, config.inertia() / (2.0 * config.hbar())) / tau;
    let alpha = config.flux_quanta();
    let step = |d: f64| (stiffness * d * d + Complex64::new(0.0, alpha * d)).exp();

    let half = (2 * windings + 1) as f64 * PI;
    let ys: Vec<f64> = (0..nodes).map(|k| -half + k as f64 * h).collect();
    let angles: Vec<f64> = grid.points().collect();
    let start = spec.start();

    let values = if n == 1 {
        angles
            .iter()
            .map(|phi| {
                (-windings..=windings)
                    .map(|w| step(phi + TAU * w as f64 - start))
                    .sum()
            })
            .collect()
    } else {
        let mut v: Vec<Complex64> = ys.iter().map(|y| step(y - start)).collect();
        if n > 2 {
            // offsets[d + nodes - 1] = step(d·h); not even once flux is on
            let offsets: Vec<Complex64> = (0..2 * nodes - 1)
                .map(|d| step((d as f64 - (nodes - 1) as f64) * h))
                .collect();
            for _ in 2..n {
                v = (0..nodes)
                    .map(|i| {
                        (0..nodes)
                            .map(|k| offsets[i + nodes - 1 - k] * v[k])
                            .sum::<Complex64>()
                            * h
                    })
                    .collect();
            }
        }
        angles
            .iter()
            .map(|phi| {
                (-windings..=windings)
                    .map(|w| {
                        let end = phi + TAU * w as f64;
                        ys.iter()
                            .zip(&v)
                            .map(|(y, vk)| step(end - y) * vk)
                            .sum::<Complex64>()
                            * h
                    })
                    .sum()
            })
            .collect()
    };
    let config_space = Propagator {
        angles: angles.clone(),
        values,
    };
    let exact = spectral_propagator(
        config,
        spec.momentum_cutoff(),
        tau * n as f64,
        start,
        &angles,
    );

    let num: Complex64 = config_space
        .values
        .iter()
        .zip(&exact.values)
        .map(|(a, b)| a.conj() * b)
        .sum();
    let den: f64 = config_space.values.iter().map(|a| a.norm_sqr()).sum();
    let constant = num / den;
    let fitted = Propagator {
        angles: angles.clone(),
        values: config_space.values.iter().map(|v| v * constant).collect(),
    };
    let residual = fitted.relative_l2(&exact);
    let analytic_constant = (Complex64::new(config.inertia(), 0.0)
        / (Complex64::new(0.0, TAU * config.hbar()) * tau))
        .sqrt()
        .powu(n as u32);
    Ok(ConfigSpaceFit {
        config_space,
        exact,
        constant,
        analytic_constant,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{evolve, localized_state, return_time, shift_angle};
    use crate::angle::wrap;
    use crate::estimate::argmax;
    use crate::state::{density_on_grid, WaveState};

    fn spec(steps: usize, l: usize, g: usize) -> PathSpec {
        PathSpec::new(steps, 0.0)
            .unwrap()
            .with_momentum_cutoff(l)
            .unwrap()
            .with_grid(AngleGrid::new(g).unwrap())
    }

    fn exact_at_return(config: &RingConfig, s: &PathSpec) -> Propagator {
        let angles: Vec<f64> = s.grid().points().collect();
        spectral_propagator(
            config,
            s.momentum_cutoff(),
            Complex64::new(return_time(config), 0.0),
            s.start(),
            &angles,
        )
    }

    #[test]
    fn single_step_is_the_spectral_kernel() {
        let cfg = RingConfig::natural(0.4);
        for l in [1, 5, 12] {
            let s = spec(1, l, 64);
            let k = phase_space_propagator(&cfg, &s).unwrap();
            assert!(k.relative_l2(&exact_at_return(&cfg, &s)) < 1e-14);
        }
    }

    #[test]
    fn insertions_are_exact() {
        for flux in [0.0, 0.7] {
            let cfg = RingConfig::natural(flux);
            let s = spec(3, 6, 128);
            let k = phase_space_propagator(&cfg, &s).unwrap();
            assert!(k.relative_l2(&exact_at_return(&cfg, &s)) < 1e-6);
            let k6 = phase_space_propagator(&cfg, &spec(6, 6, 128)).unwrap();
            assert!(k6.relative_l2(&k) < 1e-8);
        }
    }

    #[test]
    fn start_angle_is_respected() {
        let cfg = RingConfig::natural(-0.3);
        let s = spec(2, 8, 64).with_start(0.9).unwrap();
        let k = phase_space_propagator(&cfg, &s).unwrap();
        assert!(k.relative_l2(&exact_at_return(&cfg, &s)) < 1e-12);
    }

    #[test]
    fn cost_guards() {
        let cfg = RingConfig::default();
        assert!(matches!(
            phase_space_propagator(&cfg, &spec(7, 6, 64)),
            Err(Error::CostGuard(_))
        ));
        assert!(matches!(
            phase_space_propagator(&cfg, &spec(2, 13, 64)),
            Err(Error::CostGuard(_))
        ));
        assert!(matches!(
            phase_space_propagator(&cfg, &spec(2, 6, 512)),
            Err(Error::CostGuard(_))
        ));
        assert!(matches!(
            config_space_propagator(&cfg, &spec(6, 6, 64)),
            Err(Error::CostGuard(_))
        ));
        let wide = spec(2, 6, 2048).with_winding_cutoff(3);
        assert!(matches!(
            config_space_propagator(&cfg, &wide),
            Err(Error::CostGuard(_))
        ));
    }

    #[test]
    fn kernel_at_return_peaks_at_revival() {
        let grid = AngleGrid::new(256).unwrap();
        let angles: Vec<f64> = grid.points().collect();
        for flux in [0.0, 0.7, 2.6] {
            let cfg = RingConfig::natural(flux);
            let k = spectral_propagator(
                &cfg,
                40,
                Complex64::new(return_time(&cfg), 0.0),
                0.0,
                &angles,
            );
            let modulus: Vec<f64> = k.values.iter().map(|v| v.norm_sqr()).collect();
            let peak = argmax(&modulus);
            assert_eq!(peak, grid.nearest_index(wrap(shift_angle(&cfg))));
            // agrees with evolving the truncated delta state
            let evolved = evolve(&localized_state(40).unwrap(), &cfg, return_time(&cfg)).unwrap();
            let d = density_on_grid(&evolved.state, &grid);
            assert_eq!(argmax(&d), peak);
        }
    }

    #[test]
    fn spectral_kernel_propagates_states() {
        // ∫ K(φ - φ') Ψ(φ') dφ' reproduces the spectral evolution
        let cfg = RingConfig::natural(0.35);
        let l = 6;
        let s = WaveState::from_fn(l, 1, |m, _| {
            Complex64::new(1.0 / (1.0 + (m * m) as f64), 0.2 * m as f64)
        })
        .unwrap()
        .normalized()
        .unwrap();
        let t = 1.3;
        let grid = AngleGrid::new(64).unwrap();
        let pts: Vec<f64> = grid.points().collect();
        let psi0: Vec<Complex64> = pts
            .iter()
            .map(|p| crate::state::position_amplitude(&s, *p, 0).unwrap())
            .collect();
        let evolved = evolve(&s, &cfg, t).unwrap();
        for (i, phi) in pts.iter().enumerate().step_by(7) {
            let k = spectral_propagator(
                &cfg,
                l,
                Complex64::new(t, 0.0),
                0.0,
                &pts.iter().map(|p| phi - p).collect::<Vec<_>>(),
            );
            let conv: Complex64 = k
                .values
                .iter()
                .zip(&psi0)
                .map(|(a, b)| a * b)
                .sum::<Complex64>()
                * grid.spacing();
            let direct = crate::state::position_amplitude(&evolved.state, pts[i], 0).unwrap()
                * evolved.global_phase_removed;
            assert!((conv - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn config_space_single_step() {
        let cfg = RingConfig::default();
        let s = spec(1, 40, 96)
            .with_winding_cutoff(3)
            .with_regulator(0.5)
            .unwrap();
        let fit = config_space_propagator(&cfg, &s).unwrap();
        assert!(fit.residual <= 1e-3, "residual {}", fit.residual);
        assert!((fit.constant / fit.analytic_constant - 1.0).norm() < 1e-3);
    }

    #[test]
    fn config_space_three_steps() {
        let cfg = RingConfig::default();
        let s = spec(3, 40, 96)
            .with_winding_cutoff(3)
            .with_regulator(0.5)
            .unwrap();
        let fit = config_space_propagator(&cfg, &s).unwrap();
        // frozen from the first measurement (1.3e-4)
        assert!(fit.residual <= 5e-4, "residual {}", fit.residual);
        assert!((fit.constant / fit.analytic_constant - 1.0).norm() < 1e-3);
    }

    #[test]
    fn flux_enters_only_through_the_boundary_term() {
        let base = spec(3, 40, 96)
            .with_winding_cutoff(3)
            .with_regulator(0.5)
            .unwrap();
        let free = config_space_propagator(&RingConfig::natural(0.0), &base).unwrap();
        let flux = config_space_propagator(&RingConfig::natural(0.7), &base).unwrap();
        assert!(flux.residual <= 5e-4, "residual {}", flux.residual);
        // same Gaussian normalization for both fluxes
        assert!((flux.constant / free.constant - 1.0).norm() < 1e-3);
        assert!(free.config_space.relative_l2(&flux.config_space) > 0.1);
    }

    #[test]
    fn weak_regulator_does_not_converge() {
        let s = spec(1, 40, 96).with_winding_cutoff(3);
        let fit = config_space_propagator(&RingConfig::default(), &s).unwrap();
        assert!(fit.residual > 0.5);
    }
}
