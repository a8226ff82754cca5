//! Non-abelian (U(N)) flux through the ring.
//!
//! The particle carries an internal index acted on by the holonomy
//! `U_AB = exp(iΘ)`, with `Θ` the Hermitian loop integral of the gauge field
//! divided by `ħ`. In the eigenbasis of `Θ` each channel `b` behaves like an
//! abelian ring with `qΦ/ħ → θ_b`, so after one return time the mode `m`
//! picks up `e^{2iθ_b m}`: the ring estimates the eigenphases of `W = U_AB²`.

mod generators;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use generators::generator_basis;

use crate::abelian::{localized_state, return_time};
use crate::angle::{wrap, AngleGrid};
use crate::error::{invalid, Error, Result};
use crate::estimate::{locate_peak, PhaseEstimate};
use crate::state::{density_on_grid, RingConfig, WaveState};

const HERMITIAN_TOL: f64 = 1e-12;

/// Constant U(N) gauge field along the ring, stored as its loop integral
/// `Θ = (1/ħ)∮A^k X_k·dx` for one winding.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    theta: DMatrix<Complex64>,
    coefficients: Option<Vec<f64>>,
}

/// Eigen-decomposition `Θ = V diag(θ) V†`, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeSpectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl GaugeSpectrum {
    pub fn vector(&self, b: usize) -> Vec<Complex64> {
        self.vectors.column(b).iter().copied().collect()
    }
}

impl GaugeField {
    /// Accepts `theta` if `‖Θ - Θ†‖ ≤ 1e-12·‖Θ‖` (Frobenius).
    pub fn from_matrix(theta: DMatrix<Complex64>) -> Result<Self> {
        if theta.nrows() != theta.ncols() || theta.nrows() == 0 {
            return Err(Error::ShapeMismatch(format!(
                "gauge matrix must be square and non-empty, got {}x{}",
                theta.nrows(),
                theta.ncols()
            )));
        }
        if theta.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("gauge matrix"));
        }
        let residual = (&theta - theta.adjoint()).norm();
        if residual > HERMITIAN_TOL * theta.norm() {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self {
            theta,
            coefficients: None,
        })
    }

    /// Row-major `(re, im)` pairs, `2N²` numbers in total.
    pub fn from_row_major(dim: usize, re_im: &[f64]) -> Result<Self> {
        if dim == 0 || re_im.len() != 2 * dim * dim {
            return Err(Error::ShapeMismatch(format!(
                "expected {} numbers for N={dim}, got {}",
                2 * dim * dim,
                re_im.len()
            )));
        }
        let theta = DMatrix::from_fn(dim, dim, |i, j| {
            let k = 2 * (i * dim + j);
            Complex64::new(re_im[k], re_im[k + 1])
        });
        Self::from_matrix(theta)
    }

    /// `Θ = Σ_k A^k X_k` over [`generator_basis`].
    pub fn from_coefficients(dim: usize, coefficients: &[f64]) -> Result<Self> {
        let basis = generator_basis(dim)?;
        if coefficients.len() != basis.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} generator coefficients for N={dim}, got {}",
                basis.len(),
                coefficients.len()
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("generator coefficient"));
        }
        let mut theta = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for (a, x) in coefficients.iter().zip(&basis) {
            theta += x * Complex64::new(*a, 0.0);
        }
        Ok(Self {
            theta,
            coefficients: Some(coefficients.to_vec()),
        })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::from_coefficients(dim, &vec![0.0; dim * dim])
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("dim", "need at least one eigenvalue"));
        }
        let d =
            DVector::from_iterator(values.len(), values.iter().map(|v| Complex64::new(*v, 0.0)));
        Self::from_matrix(DMatrix::from_diagonal(&d))
    }

    /// The U(1) case: `Θ = [qΦ/ħ]`.
    pub fn abelian(config: &RingConfig) -> Self {
        let theta = config.charge() * config.flux() / config.hbar();
        Self {
            theta: DMatrix::from_element(1, 1, Complex64::new(theta, 0.0)),
            coefficients: Some(vec![theta]),
        }
    }

    /// Seeded field with generator coefficients uniform in `[-scale, scale]`.
    pub fn random(dim: usize, scale: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<f64> = (0..dim * dim)
            .map(|_| rng.random_range(-1.0..=1.0) * scale)
            .collect();
        Self::from_coefficients(dim, &coeffs)
    }

    /// Gauge-transformed field `UΘU†`.
    pub fn conjugated(&self, unitary: &DMatrix<Complex64>) -> Result<Self> {
        if unitary.shape() != self.theta.shape() {
            return Err(Error::ShapeMismatch(
                "unitary and gauge dimensions differ".into(),
            ));
        }
        let t = unitary * &self.theta * unitary.adjoint();
        // restore exact Hermiticity lost to roundoff
        let t = (&t + t.adjoint()) * Complex64::new(0.5, 0.0);
        Self::from_matrix(t)
    }

    pub fn dim(&self) -> usize {
        self.theta.nrows()
    }

    pub fn theta(&self) -> &DMatrix<Complex64> {
        &self.theta
    }

    pub fn coefficients(&self) -> Option<&[f64]> {
        self.coefficients.as_deref()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        (&self.theta - self.theta.adjoint()).norm()
    }

    pub fn spectrum(&self) -> GaugeSpectrum {
        let eig = SymmetricEigen::new(self.theta.clone());
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(self.dim(), self.dim(), |r, c| {
            eig.eigenvectors[(r, order[c])]
        });
        GaugeSpectrum { values, vectors }
    }
}

/// The holonomy `U_AB = exp(iΘ)` with its eigen-data.
#[derive(Debug, Clone, PartialEq)]
pub struct Holonomy {
    pub u_ab: DMatrix<Complex64>,
    /// Eigenvalues `θ_b` of `Θ`, ascending.
    pub theta_values: Vec<f64>,
    /// `wrap(θ_b)`.
    pub eigenphases: Vec<f64>,
    pub eigenvectors: DMatrix<Complex64>,
}

impl Holonomy {
    /// Eigenphases of `U_AB^k`, i.e. `wrap(k θ_b)`.
    pub fn power_phases(&self, k: i32) -> Vec<f64> {
        self.theta_values
            .iter()
            .map(|t| wrap(k as f64 * t))
            .collect()
    }

    pub fn unitarity_residual(&self) -> f64 {
        let n = self.u_ab.nrows();
        (&self.u_ab * self.u_ab.adjoint() - DMatrix::<Complex64>::identity(n, n)).norm()
    }
}

/// `U_AB = V e^{iΛ} V†` from the Hermitian eigen-decomposition of `Θ`.
pub fn holonomy(gauge: &GaugeField) -> Holonomy {
    let spec = gauge.spectrum();
    let phases = DVector::from_iterator(
        spec.values.len(),
        spec.values.iter().map(|t| Complex64::cis(*t)),
    );
    let u_ab = &spec.vectors * DMatrix::from_diagonal(&phases) * spec.vectors.adjoint();
    Holonomy {
        u_ab,
        eigenphases: spec.values.iter().map(|t| wrap(*t)).collect(),
        theta_values: spec.values,
        eigenvectors: spec.vectors,
    }
}

/// Evolves a spinor-valued ring state for time `t` in the gauge field.
///
/// Channel `b` of `Θ` evolves with `E_{m,b} = (ħ²/2m_q r²)(m - θ_b/2π)²`.
/// No phase is removed. `config.flux()` is ignored.
pub fn evolve_spinor(
    state: &WaveState,
    config: &RingConfig,
    gauge: &GaugeField,
    t: f64,
) -> Result<WaveState> {
    if state.internal_dim() != gauge.dim() {
        return Err(Error::ShapeMismatch(format!(
            "state internal_dim {} vs gauge dim {}",
            state.internal_dim(),
            gauge.dim()
        )));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite("time"));
    }
    let spec = gauge.spectrum();
    evolve_in_spectrum(state, config, &spec, t)
}

fn evolve_in_spectrum(
    state: &WaveState,
    config: &RingConfig,
    spec: &GaugeSpectrum,
    t: f64,
) -> Result<WaveState> {
    let n = spec.values.len();
    let wt = config.rotor_frequency() * t;
    let betas: Vec<f64> = spec
        .values
        .iter()
        .map(|th| th / std::f64::consts::TAU)
        .collect();
    let v_adj = spec.vectors.adjoint();
    let mut out = Vec::with_capacity(state.amplitudes().len());
    for m in state.modes() {
        let c = DVector::from_column_slice(state.mode(m));
        let mut x = &v_adj * c;
        let mf = m as f64;
        for b in 0..n {
            let beta = betas[b];
            x[b] *= Complex64::cis(-wt * (mf * (mf - 2.0 * beta) + beta * beta));
        }
        out.extend((&spec.vectors * x).iter().copied());
    }
    WaveState::from_amplitudes(state.cutoff(), n, out)
}

fn check_channel(gauge: &GaugeField, channel: usize) -> Result<()> {
    if channel >= gauge.dim() {
        return Err(Error::IndexOutOfRange {
            index: channel,
            limit: gauge.dim(),
        });
    }
    Ok(())
}

/// Full phase estimation of `W = U_AB²` on eigenchannel `channel`.
///
/// The particle starts localized at `φ = 0` with internal state `v_b`,
/// evolves for one return time and the revived peak sits at `-2θ_b`. The
/// returned `phase` is `wrap(-refined_peak)`, the estimate of `2θ_b`.
pub fn nonabelian_qpe(
    gauge: &GaugeField,
    channel: usize,
    config: &RingConfig,
    l: usize,
    grid: &AngleGrid,
) -> Result<PhaseEstimate> {
    check_channel(gauge, channel)?;
    grid.require_resolves(l)?;
    let spec = gauge.spectrum();
    let start = WaveState::tensor(&localized_state(l)?, &spec.vector(channel))?;
    let evolved = evolve_in_spectrum(&start, config, &spec, return_time(config))?;
    let distribution = density_on_grid(&evolved, grid);
    let peak = locate_peak(grid, &distribution)?;
    Ok(PhaseEstimate {
        phase: wrap(-peak.refined),
        grid_peak: peak.index,
        refined_peak: peak.refined,
        half_width: peak.half_width,
        distribution,
    })
}

/// One resolved peak of a multi-channel read-out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelPeak {
    pub angle: f64,
    /// `wrap(-angle)`, the estimated eigenphase of `W`.
    pub phase: f64,
    /// Probability mass of the peak's cell of the ring.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperpositionReport {
    pub distribution: Vec<f64>,
    pub peaks: Vec<ChannelPeak>,
    /// Ground truth `wrap(2θ_b)` per channel.
    pub channel_phases: Vec<f64>,
    /// Ground truth `|w_b|²` per channel.
    pub channel_weights: Vec<f64>,
}

/// Peaks lower than this fraction of the tallest are treated as side lobes.
const PEAK_THRESHOLD: f64 = 0.1;

/// Runs the estimation with internal state `Σ_b w_b v_b` and splits the
/// resulting angle distribution into peaks.
///
/// Each local maximum above [`PEAK_THRESHOLD`] of the global maximum is a
/// peak; the ring is cut at the midpoints between neighbouring peaks and
/// each cell's mass is that peak's weight.
pub fn superposition_check(
    gauge: &GaugeField,
    weights: &[Complex64],
    config: &RingConfig,
    l: usize,
    grid: &AngleGrid,
) -> Result<SuperpositionReport> {
    if weights.len() != gauge.dim() {
        return Err(Error::ShapeMismatch(format!(
            "{} weights for gauge dim {}",
            weights.len(),
            gauge.dim()
        )));
    }
    let norm_sqr: f64 = weights.iter().map(|w| w.norm_sqr()).sum();
    if (norm_sqr - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { norm_sqr });
    }
    grid.require_resolves(l)?;
    let spec = gauge.spectrum();
    let internal = &spec.vectors * DVector::from_column_slice(weights);
    let start = WaveState::tensor(&localized_state(l)?, internal.as_slice())?;
    let evolved = evolve_in_spectrum(&start, config, &spec, return_time(config))?;
    let distribution = density_on_grid(&evolved, grid);
    let peaks = split_peaks(grid, &distribution)?;
    Ok(SuperpositionReport {
        distribution,
        peaks,
        channel_phases: spec.values.iter().map(|t| wrap(2.0 * t)).collect(),
        channel_weights: weights.iter().map(|w| w.norm_sqr()).collect(),
    })
}

fn split_peaks(grid: &AngleGrid, density: &[f64]) -> Result<Vec<ChannelPeak>> {
    let g = density.len();
    let top = locate_peak(grid, density)?;
    let threshold = PEAK_THRESHOLD * density[top.index];
    let maxima: Vec<usize> = (0..g)
        .filter(|&i| {
            let (l, c, r) = (density[(i + g - 1) % g], density[i], density[(i + 1) % g]);
            c > l && c >= r && c >= threshold
        })
        .collect();
    let h = grid.spacing();
    if maxima.len() <= 1 {
        let total: f64 = density.iter().sum::<f64>() * h;
        return Ok(vec![ChannelPeak {
            angle: top.refined,
            phase: wrap(-top.refined),
            weight: total,
        }]);
    }
    let mut peaks = Vec::with_capacity(maxima.len());
    for (n, &i) in maxima.iter().enumerate() {
        let prev = maxima[(n + maxima.len() - 1) % maxima.len()];
        let next = maxima[(n + 1) % maxima.len()];
        // cell spans the circular midpoints to both neighbours
        let back = ((i + g - prev) % g) / 2;
        let fwd = ((next + g - i) % g).div_ceil(2);
        let weight: f64 = (i + g - back..i + g + fwd)
            .map(|k| density[k % g])
            .sum::<f64>()
            * h;
        let local: Vec<f64> = (0..g)
            .map(|k| {
                let d = (k + g - i) % g;
                if d <= 1 || d == g - 1 {
                    density[k]
                } else {
                    0.0
                }
            })
            .collect();
        let refined = locate_peak(grid, &local)?.refined;
        peaks.push(ChannelPeak {
            angle: refined,
            phase: wrap(-refined),
            weight,
        });
    }
    Ok(peaks)
}
