//! Exact spectral evolution of the particle on a ring with an abelian flux.
//!
//! Every angular-momentum mode `|m⟩` is an energy eigenstate with
//! `E_m = (ħ²/2m_q r²)(m - qΦ/2πħ)²`, so evolution is a diagonal phase.
//! At the return time `t_R = 4π m_q r²/ħ` the quadratic part of every phase
//! is a multiple of `2π` and only the flux-linear part survives: the state
//! reappears rotated by `φ_Φ = -2qΦ/ħ`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::state::{RingConfig, WaveState};

/// Energy of mode `m`.
pub fn energy(config: &RingConfig, m: i64) -> f64 {
    let hbar = config.hbar();
    let d = m as f64 - config.flux_quanta();
    hbar * config.rotor_frequency() * d * d
}

/// Revival time `t_R = 4π m_q r² / ħ` of the flux-free ring.
pub fn return_time(config: &RingConfig) -> f64 {
    4.0 * PI * config.inertia() / config.hbar()
}

/// Drift velocity `ω_Φ = qΦ / (2π m_q r²)` of the flux-induced rotation.
pub fn angular_velocity(config: &RingConfig) -> f64 {
    config.charge() * config.flux() / (2.0 * PI * config.inertia())
}

/// Rotation accumulated over one return time, `φ_Φ = -2qΦ/ħ`, not wrapped.
pub fn shift_angle(config: &RingConfig) -> f64 {
    -2.0 * config.charge() * config.flux() / config.hbar()
}

/// Evolved state with the flux-dependent overall phase divided out.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub state: WaveState,
    pub elapsed: f64,
    /// `e^{-i(ħ/2m_q r²)(qΦ/2πħ)² t}`, removed from every amplitude.
    pub global_phase_removed: Complex64,
}

/// Multiplies each `c_m` by its wiggle factor `e^{-iE_m t/ħ}`.
///
/// The `m`-independent factor is reported in
/// [`EvolutionResult::global_phase_removed`] rather than applied.
pub fn evolve(state: &WaveState, config: &RingConfig, t: f64) -> Result<EvolutionResult> {
    if state.internal_dim() != 1 {
        return Err(Error::ShapeMismatch(format!(
            "abelian evolution needs internal_dim 1, got {}; use the non-abelian module",
            state.internal_dim()
        )));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite("time"));
    }
    if t < 0.0 {
        return Err(invalid("time", format!("must be >= 0, got {t}")));
    }
    let alpha = config.flux_quanta();
    let wt = config.rotor_frequency() * t;
    let mut out = state.clone();
    for (m, c) in out.modes_mut() {
        let m = m as f64;
        // (m - α)² - α² = m (m - 2α)
        c[0] *= Complex64::cis(-wt * m * (m - 2.0 * alpha));
    }
    Ok(EvolutionResult {
        state: out,
        elapsed: t,
        global_phase_removed: Complex64::cis(-wt * alpha * alpha),
    })
}

/// Truncated delta function at `φ = 0`: `c_m = 1/√(2l+1)` for `|m| ≤ l`.
pub fn localized_state(l: usize) -> Result<WaveState> {
    if l < 1 {
        return Err(invalid("cutoff", "localized state needs l >= 1"));
    }
    let c = Complex64::new(1.0 / ((2 * l + 1) as f64).sqrt(), 0.0);
    WaveState::from_fn(l, 1, |_, _| c)
}

/// Rigid rotation `Ψ(φ) → Ψ(φ - angle)`: multiplies `c_{m,a}` by `e^{-im·angle}`.
pub fn rotate(state: &WaveState, angle: f64) -> WaveState {
    let mut out = state.clone();
    for (m, c) in out.modes_mut() {
        let f = Complex64::cis(-(m as f64) * angle);
        c.iter_mut().for_each(|x| *x *= f);
    }
    out
}

/// Coefficient-space distance between the flux evolution and the flux-free
/// evolution rotated by `-ω_Φ t`, after removing the reported global phase.
///
/// Zero in exact arithmetic; the returned value measures roundoff.
pub fn shift_identity_residual(config: &RingConfig, state: &WaveState, t: f64) -> Result<f64> {
    let with_flux = evolve(state, config, t)?;
    let free = evolve(state, &config.with_flux(0.0), t)?;
    let rotated = rotate(&free.state, -angular_velocity(config) * t);
    with_flux.state.distance(&rotated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::{wrap, AngleGrid};
    use crate::state::{density_on_grid, inner};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(l: usize, rng: &mut impl Rng) -> WaveState {
        WaveState::from_fn(l, 1, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
        .unwrap()
        .normalized()
        .unwrap()
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy(&RingConfig::natural(0.0), 3), 4.5);
        assert!((energy(&RingConfig::natural(0.7), 2) - 1.783_389_002_169_439_6).abs() < 1e-12);
        assert!(energy(&RingConfig::natural(2.0 * PI), 1).abs() < 1e-15);
    }

    #[test]
    fn return_time_scaling() {
        let cfg = RingConfig::default();
        assert!((return_time(&cfg) - 12.566_370_614_359_172).abs() < 1e-12);
        let small = cfg.with_hbar(0.1).unwrap();
        assert!((return_time(&small) / return_time(&cfg) - 10.0).abs() < 1e-12);
        let heavy = RingConfig::new(1.0, 2.0, 1.0, 1.0, 0.0).unwrap();
        assert!((return_time(&heavy) / return_time(&cfg) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn velocity_and_shift() {
        assert_eq!(angular_velocity(&RingConfig::natural(0.0)), 0.0);
        assert!(
            (angular_velocity(&RingConfig::natural(0.7)) - 0.111_408_460_164_326_73).abs() < 1e-15
        );
        assert_eq!(shift_angle(&RingConfig::natural(0.0)), 0.0);
        assert!((shift_angle(&RingConfig::natural(0.7)) + 1.4).abs() < 1e-15);
        assert_eq!(shift_angle(&RingConfig::natural(4.0)), -8.0);
        assert!((wrap(-8.0) + 1.716_814_692_820_413_8).abs() < 1e-14);

        for cfg in [
            RingConfig::natural(0.7),
            RingConfig::new(0.3, 2.5, 0.8, -1.7, 2.2).unwrap(),
            RingConfig::new(1e-2, 1.0, 3.0, 0.5, 13.0).unwrap(),
        ] {
            let product = angular_velocity(&cfg) * return_time(&cfg);
            let expected = 2.0 * cfg.charge() * cfg.flux() / cfg.hbar();
            assert!((product - expected).abs() <= 1e-15 * expected.abs());
            assert!((shift_angle(&cfg) + product).abs() <= 1e-15 * expected.abs());
        }
    }

    #[test]
    fn evolve_zero_time_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_state(10, &mut rng);
        let r = evolve(&s, &RingConfig::natural(0.9), 0.0).unwrap();
        assert_eq!(r.state, s);
        assert_eq!(r.global_phase_removed, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn evolve_rejects_bad_input() {
        let s = WaveState::zeros(2, 2).unwrap();
        assert!(matches!(
            evolve(&s, &RingConfig::default(), 1.0),
            Err(Error::ShapeMismatch(_))
        ));
        let s = localized_state(2).unwrap();
        assert!(evolve(&s, &RingConfig::default(), -1.0).is_err());
        assert!(evolve(&s, &RingConfig::default(), f64::NAN).is_err());
        assert!(localized_state(0).is_err());
    }

    #[test]
    fn return_property() {
        let cfg = RingConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let s = random_state(32, &mut rng);
            let r = evolve(&s, &cfg, return_time(&cfg)).unwrap();
            for (a, b) in r.state.amplitudes().iter().zip(s.amplitudes()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn flux_moves_the_revival() {
        let cfg = RingConfig::natural(0.7);
        let s = localized_state(64).unwrap();
        let r = evolve(&s, &cfg, return_time(&cfg)).unwrap();
        let grid = AngleGrid::new(1024).unwrap();
        let d = density_on_grid(&r.state, &grid);
        let peak = (0..d.len()).max_by(|&i, &j| d[i].total_cmp(&d[j])).unwrap();
        assert!((grid.point(peak) - wrap(-1.4)).abs() <= grid.spacing());
    }

    #[test]
    fn unitarity_and_composition() {
        let cfg = RingConfig::new(0.7, 1.3, 0.9, 1.1, 0.45).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let s = random_state(24, &mut rng);
            let (t1, t2) = (rng.random_range(0.0..20.0), rng.random_range(0.0..20.0));
            let once = evolve(&s, &cfg, t1 + t2).unwrap();
            assert!((once.state.norm_sqr() - 1.0).abs() < 1e-12);
            assert!((once.global_phase_removed.norm() - 1.0).abs() < 1e-12);
            let a = evolve(&s, &cfg, t1).unwrap();
            let b = evolve(&a.state, &cfg, t2).unwrap();
            assert!(once.state.distance(&b.state).unwrap() < 1e-11);
            let g = a.global_phase_removed * b.global_phase_removed;
            assert!((g - once.global_phase_removed).norm() < 1e-11);
        }
    }

    #[test]
    fn per_mode_phase_after_return() {
        for flux in [0.3, -1.1, 2.9] {
            let cfg = RingConfig::natural(flux);
            let t = return_time(&cfg);
            let zero = evolve(&WaveState::basis(8, 0).unwrap(), &cfg, t).unwrap();
            let p0 = zero.state[(0, 0)];
            for m in -8..=8 {
                let r = evolve(&WaveState::basis(8, m).unwrap(), &cfg, t).unwrap();
                let ratio = r.state[(m, 0)] / p0;
                let expected = Complex64::cis(2.0 * flux * m as f64);
                assert!((ratio - expected).norm() < 1e-12, "m={m} flux={flux}");
            }
        }
    }

    #[test]
    fn shift_identity_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_state(32, &mut rng);
        assert!(shift_identity_residual(&RingConfig::default(), &s, 3.3).unwrap() < 1e-12);
        let cfg = RingConfig::natural(0.7);
        let t = return_time(&cfg) / 2f64.sqrt();
        assert!(shift_identity_residual(&cfg, &s, t).unwrap() < 1e-10);
        let cfg = RingConfig::natural(2.3);
        let loc = localized_state(64).unwrap();
        assert!(shift_identity_residual(&cfg, &loc, return_time(&cfg)).unwrap() < 1e-10);
    }

    #[test]
    fn localized_state_examples() {
        let s = localized_state(1).unwrap();
        for m in -1..=1 {
            assert!((s[(m, 0)].re - 1.0 / 3f64.sqrt()).abs() < 1e-16);
        }
        let s = localized_state(100).unwrap();
        assert_eq!(s.amplitudes().len(), 201);
        assert!((inner(&s, &s).unwrap().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rotation_moves_density() {
        let s = localized_state(40).unwrap();
        let grid = AngleGrid::new(512).unwrap();
        let target = grid.point(300);
        let d = density_on_grid(&rotate(&s, target), &grid);
        let peak = (0..d.len()).max_by(|&i, &j| d[i].total_cmp(&d[j])).unwrap();
        assert_eq!(peak, 300);
    }
}
