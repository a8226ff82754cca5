//! Physical constants of the ring and truncated angular-momentum states.

use std::f64::consts::{PI, TAU};
use std::ops::{Index, RangeInclusive};

use num_complex::Complex64;
use serde::Serialize;

use crate::angle::AngleGrid;
use crate::error::{invalid, Error, Result};

/// Physical constants of a charged particle on a ring of radius `r`
/// threaded by a static flux `Φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RingConfig {
    hbar: f64,
    mass: f64,
    radius: f64,
    charge: f64,
    flux: f64,
}

impl Default for RingConfig {
    /// Natural units with no flux.
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            radius: 1.0,
            charge: 1.0,
            flux: 0.0,
        }
    }
}

impl RingConfig {
    pub fn new(hbar: f64, mass: f64, radius: f64, charge: f64, flux: f64) -> Result<Self> {
        for (name, v) in [("hbar", hbar), ("mass", mass), ("radius", radius)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !charge.is_finite() {
            return Err(Error::NonFinite("charge"));
        }
        if !flux.is_finite() {
            return Err(Error::NonFinite("flux"));
        }
        Ok(Self {
            hbar,
            mass,
            radius,
            charge,
            flux,
        })
    }

    /// Natural units (`ħ = m_q = r = q = 1`) with the given flux.
    pub fn natural(flux: f64) -> Self {
        Self {
            flux,
            ..Self::default()
        }
    }

    pub fn with_flux(self, flux: f64) -> Self {
        Self { flux, ..self }
    }

    pub fn with_hbar(self, hbar: f64) -> Result<Self> {
        Self::new(hbar, self.mass, self.radius, self.charge, self.flux)
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn charge(&self) -> f64 {
        self.charge
    }

    pub fn flux(&self) -> f64 {
        self.flux
    }

    /// Moment of inertia `m_q r²`.
    pub fn inertia(&self) -> f64 {
        self.mass * self.radius * self.radius
    }

    /// Frequency scale `ħ / (2 m_q r²)`; `E_m / ħ` is this times `(m - α)²`.
    pub fn rotor_frequency(&self) -> f64 {
        self.hbar / (2.0 * self.inertia())
    }

    /// Flux in units of the flux quantum, `α = qΦ / 2πħ`.
    pub fn flux_quanta(&self) -> f64 {
        self.charge * self.flux / (TAU * self.hbar)
    }
}

/// Truncated state `Σ_{m,a} c_{m,a} |m⟩|a⟩` with `m ∈ [-l, l]` and an
/// optional internal index `a ∈ [0, N)`.
///
/// Amplitudes are stored mode-major: offset `(m + l)·N + a`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    cutoff: usize,
    internal_dim: usize,
    amplitudes: Vec<Complex64>,
}

impl WaveState {
    pub fn zeros(cutoff: usize, internal_dim: usize) -> Result<Self> {
        if cutoff < 1 {
            return Err(invalid("cutoff", "must be at least 1"));
        }
        if internal_dim < 1 {
            return Err(invalid("internal_dim", "must be at least 1"));
        }
        Ok(Self {
            cutoff,
            internal_dim,
            amplitudes: vec![Complex64::new(0.0, 0.0); (2 * cutoff + 1) * internal_dim],
        })
    }

    pub fn from_amplitudes(
        cutoff: usize,
        internal_dim: usize,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self> {
        let mut s = Self::zeros(cutoff, internal_dim)?;
        if amplitudes.len() != s.amplitudes.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} amplitudes for l={cutoff}, N={internal_dim}, got {}",
                s.amplitudes.len(),
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("amplitude"));
        }
        s.amplitudes = amplitudes;
        Ok(s)
    }

    pub fn from_fn(
        cutoff: usize,
        internal_dim: usize,
        mut f: impl FnMut(i64, usize) -> Complex64,
    ) -> Result<Self> {
        let mut s = Self::zeros(cutoff, internal_dim)?;
        let l = cutoff as i64;
        for m in -l..=l {
            for a in 0..internal_dim {
                let k = s.offset_unchecked(m, a);
                s.amplitudes[k] = f(m, a);
            }
        }
        Ok(s)
    }

    /// Pure angular-momentum eigenstate `|m⟩` (scalar internal space).
    pub fn basis(cutoff: usize, m: i64) -> Result<Self> {
        let mut s = Self::zeros(cutoff, 1)?;
        let k = s
            .offset(m, 0)
            .ok_or_else(|| invalid("m", format!("|{m}| exceeds cutoff {cutoff}")))?;
        s.amplitudes[k] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Product state `ψ(φ) ⊗ χ` of a scalar spatial state with an internal vector.
    pub fn tensor(spatial: &WaveState, internal: &[Complex64]) -> Result<Self> {
        if spatial.internal_dim != 1 {
            return Err(Error::ShapeMismatch(
                "spatial factor must have internal_dim 1".into(),
            ));
        }
        if internal.is_empty() {
            return Err(invalid("internal", "empty internal vector"));
        }
        let n = internal.len();
        let amplitudes = spatial
            .amplitudes
            .iter()
            .flat_map(|c| internal.iter().map(move |v| c * v))
            .collect();
        Ok(Self {
            cutoff: spatial.cutoff,
            internal_dim: n,
            amplitudes,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn internal_dim(&self) -> usize {
        self.internal_dim
    }

    pub fn modes(&self) -> RangeInclusive<i64> {
        let l = self.cutoff as i64;
        -l..=l
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn offset(&self, m: i64, a: usize) -> Option<usize> {
        (m.unsigned_abs() as usize <= self.cutoff && a < self.internal_dim)
            .then(|| self.offset_unchecked(m, a))
    }

    fn offset_unchecked(&self, m: i64, a: usize) -> usize {
        (m + self.cutoff as i64) as usize * self.internal_dim + a
    }

    pub fn get(&self, m: i64, a: usize) -> Option<Complex64> {
        self.offset(m, a).map(|k| self.amplitudes[k])
    }

    /// Internal vector `c_{m,·}` of mode `m`.
    pub fn mode(&self, m: i64) -> &[Complex64] {
        let start = self.offset_unchecked(m, 0);
        &self.amplitudes[start..start + self.internal_dim]
    }

    pub(crate) fn modes_mut(&mut self) -> impl Iterator<Item = (i64, &mut [Complex64])> {
        let l = self.cutoff as i64;
        self.amplitudes
            .chunks_mut(self.internal_dim)
            .enumerate()
            .map(move |(k, chunk)| (k as i64 - l, chunk))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: n * n });
        }
        self.amplitudes.iter_mut().for_each(|c| *c /= n);
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &WaveState) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub(crate) fn check_shape(&self, other: &WaveState) -> Result<()> {
        if self.cutoff != other.cutoff || self.internal_dim != other.internal_dim {
            return Err(Error::ShapeMismatch(format!(
                "(l={}, N={}) vs (l={}, N={})",
                self.cutoff, self.internal_dim, other.cutoff, other.internal_dim
            )));
        }
        Ok(())
    }
}

impl Index<(i64, usize)> for WaveState {
    type Output = Complex64;

    fn index(&self, (m, a): (i64, usize)) -> &Complex64 {
        let k = self.offset(m, a).unwrap_or_else(|| {
            panic!(
                "mode ({m}, {a}) outside l={}, N={}",
                self.cutoff, self.internal_dim
            )
        });
        &self.amplitudes[k]
    }
}

/// `⟨s1|s2⟩ = Σ conj(c1) c2`.
pub fn inner(s1: &WaveState, s2: &WaveState) -> Result<Complex64> {
    s1.check_shape(s2)?;
    Ok(s1
        .amplitudes
        .iter()
        .zip(&s2.amplitudes)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Position-space wave function `Ψ_a(φ) = Σ_m c_{m,a} e^{imφ} / √(2π)`.
pub fn position_amplitude(state: &WaveState, phi: f64, a: usize) -> Result<Complex64> {
    if a >= state.internal_dim {
        return Err(Error::IndexOutOfRange {
            index: a,
            limit: state.internal_dim,
        });
    }
    if !phi.is_finite() {
        return Err(Error::NonFinite("phi"));
    }
    Ok(amplitude_at(state, phi, a))
}

fn amplitude_at(state: &WaveState, phi: f64, a: usize) -> Complex64 {
    let sum: Complex64 = state
        .modes()
        .map(|m| state.amplitudes[state.offset_unchecked(m, a)] * Complex64::cis(m as f64 * phi))
        .sum();
    sum / TAU.sqrt()
}

/// All internal components of the wave function at each grid angle.
pub fn wavefunction_on_grid(state: &WaveState, grid: &AngleGrid) -> Vec<Vec<Complex64>> {
    grid.points()
        .map(|phi| {
            (0..state.internal_dim)
                .map(|a| amplitude_at(state, phi, a))
                .collect()
        })
        .collect()
}

/// Probability density `Σ_a |Ψ_a(φ_i)|²` at each grid point.
pub fn density_on_grid(state: &WaveState, grid: &AngleGrid) -> Vec<f64> {
    grid.points()
        .map(|phi| {
            (0..state.internal_dim)
                .map(|a| amplitude_at(state, phi, a).norm_sqr())
                .sum()
        })
        .collect()
}

/// Constant density of the `m = 0` state, `1/2π`.
pub const UNIFORM_DENSITY: f64 = 0.5 / PI;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::localized_state;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn config_validation() {
        assert!(RingConfig::new(0.0, 1.0, 1.0, 1.0, 0.0).is_err());
        assert!(RingConfig::new(1.0, -1.0, 1.0, 1.0, 0.0).is_err());
        assert!(RingConfig::new(1.0, 1.0, f64::NAN, 1.0, 0.0).is_err());
        let d = RingConfig::default();
        assert_eq!(
            (d.hbar(), d.mass(), d.radius(), d.charge(), d.flux()),
            (1.0, 1.0, 1.0, 1.0, 0.0)
        );
    }

    #[test]
    fn amplitude_examples() {
        let s = localized_state(1).unwrap();
        let v = position_amplitude(&s, 0.0, 0).unwrap();
        assert!((v.re - 0.690_988_298_942_670_9).abs() < 1e-12 && v.im.abs() < 1e-15);

        let zero = WaveState::basis(3, 0).unwrap();
        for phi in [-3.0, 0.0, 1.7] {
            let v = position_amplitude(&zero, phi, 0).unwrap();
            assert!((v - c(1.0 / TAU.sqrt(), 0.0)).norm() < 1e-15);
        }

        let two = WaveState::basis(3, 2).unwrap();
        let v = position_amplitude(&two, PI / 2.0, 0).unwrap();
        assert!((v - c(-1.0 / TAU.sqrt(), 0.0)).norm() < 1e-15);

        assert!(matches!(
            position_amplitude(&two, 0.0, 1),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn density_examples() {
        let zero = WaveState::basis(1, 0).unwrap();
        let d = density_on_grid(&zero, &AngleGrid::new(4).unwrap());
        for v in d {
            assert!((v - UNIFORM_DENSITY).abs() < 1e-15);
        }

        let grid = AngleGrid::new(1024).unwrap();
        let d = density_on_grid(&localized_state(100).unwrap(), &grid);
        let argmax = (0..d.len()).max_by(|&i, &j| d[i].total_cmp(&d[j])).unwrap();
        assert_eq!(argmax, grid.nearest_index(0.0));
    }

    #[test]
    fn inner_examples() {
        let s = localized_state(5).unwrap();
        assert!((inner(&s, &s).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        let b1 = WaveState::basis(2, 1).unwrap();
        let b2 = WaveState::basis(2, 2).unwrap();
        assert_eq!(inner(&b1, &b2).unwrap(), c(0.0, 0.0));
        let l1 = localized_state(1).unwrap();
        let b0 = WaveState::basis(1, 0).unwrap();
        assert!((inner(&l1, &b0).unwrap() - c(1.0 / 3f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!(matches!(inner(&l1, &b1), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn storage_offsets() {
        let s = WaveState::zeros(2, 3).unwrap();
        assert_eq!(s.offset(-2, 0), Some(0));
        assert_eq!(s.offset(0, 1), Some(7));
        assert_eq!(s.offset(2, 2), Some(14));
        assert_eq!(s.offset(3, 0), None);
        assert_eq!(s.offset(0, 3), None);
        assert!(WaveState::zeros(0, 1).is_err());
        assert!(WaveState::from_amplitudes(1, 1, vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn normalize_zero_state_fails() {
        let mut s = WaveState::zeros(2, 1).unwrap();
        assert!(matches!(s.normalize(), Err(Error::NotNormalized { .. })));
    }

    fn arb_state(l: usize, n: usize) -> impl Strategy<Value = WaveState> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), (2 * l + 1) * n).prop_filter_map(
            "zero vector",
            move |v| {
                WaveState::from_amplitudes(l, n, v.into_iter().map(|(a, b)| c(a, b)).collect())
                    .ok()?
                    .normalized()
                    .ok()
            },
        )
    }

    proptest! {
        #[test]
        fn normalize_gives_unit_norm(s in arb_state(6, 2)) {
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn amplitude_is_linear(
            s1 in arb_state(5, 1),
            s2 in arb_state(5, 1),
            (ar, ai, br, bi) in (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0),
            phi in -PI..PI,
        ) {
            let (alpha, beta) = (c(ar, ai), c(br, bi));
            let combo = WaveState::from_fn(5, 1, |m, a| alpha * s1[(m, a)] + beta * s2[(m, a)]).unwrap();
            let lhs = position_amplitude(&combo, phi, 0).unwrap();
            let rhs = alpha * position_amplitude(&s1, phi, 0).unwrap()
                + beta * position_amplitude(&s2, phi, 0).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn parseval_on_fine_grid(s in arb_state(8, 2), extra in 0usize..40) {
            let grid = AngleGrid::new(8 * 8 + extra).unwrap();
            let total: f64 = density_on_grid(&s, &grid).iter().sum::<f64>() * grid.spacing();
            prop_assert!((total - s.norm_sqr()).abs() < 1e-6);
        }
    }

    #[test]
    fn riemann_sum_on_large_grid() {
        let grid = AngleGrid::new(4096).unwrap();
        let s = localized_state(300).unwrap();
        let total: f64 = density_on_grid(&s, &grid).iter().sum::<f64>() * grid.spacing();
        assert!((total - 1.0).abs() < 1e-6);
    }
}
