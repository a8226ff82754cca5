//! Python bindings for the ring phase-estimation simulator.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ringqpe::nonabelian::{self, GaugeField};
use ringqpe::path_integral::{self as pi, PathSpec};
use ringqpe::qpe;
use ringqpe::{AngleGrid, Complex64};

fn err(e: ringqpe::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn grid(size: usize) -> PyResult<AngleGrid> {
    AngleGrid::new(size).map_err(err)
}

/// Physical constants of the ring and the enclosed flux.
#[pyclass(name = "RingConfig", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRingConfig(ringqpe::RingConfig);

#[pymethods]
impl PyRingConfig {
    #[new]
    #[pyo3(signature = (flux=0.0, hbar=1.0, mass=1.0, radius=1.0, charge=1.0))]
    fn new(flux: f64, hbar: f64, mass: f64, radius: f64, charge: f64) -> PyResult<Self> {
        ringqpe::RingConfig::new(hbar, mass, radius, charge, flux)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn flux(&self) -> f64 {
        self.0.flux()
    }

    #[getter]
    fn hbar(&self) -> f64 {
        self.0.hbar()
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.0.mass()
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.0.radius()
    }

    #[getter]
    fn charge(&self) -> f64 {
        self.0.charge()
    }

    fn energy(&self, m: i64) -> f64 {
        ringqpe::energy(&self.0, m)
    }

    fn return_time(&self) -> f64 {
        ringqpe::return_time(&self.0)
    }

    fn shift_angle(&self) -> f64 {
        ringqpe::shift_angle(&self.0)
    }

    fn angular_velocity(&self) -> f64 {
        ringqpe::angular_velocity(&self.0)
    }

    fn __repr__(&self) -> String {
        format!(
            "RingConfig(flux={}, hbar={}, mass={}, radius={}, charge={})",
            self.0.flux(),
            self.0.hbar(),
            self.0.mass(),
            self.0.radius(),
            self.0.charge()
        )
    }
}

/// Truncated angular-momentum state, amplitudes ordered `m = -l..=l`
/// with the internal index fastest.
#[pyclass(name = "WaveState", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyWaveState(ringqpe::WaveState);

#[pymethods]
impl PyWaveState {
    #[new]
    #[pyo3(signature = (cutoff, amplitudes, internal_dim=1))]
    fn new(cutoff: usize, amplitudes: Vec<Complex64>, internal_dim: usize) -> PyResult<Self> {
        ringqpe::WaveState::from_amplitudes(cutoff, internal_dim, amplitudes)
            .map(Self)
            .map_err(err)
    }

    /// Truncated delta function at `φ = 0`.
    #[staticmethod]
    fn localized(cutoff: usize) -> PyResult<Self> {
        ringqpe::localized_state(cutoff).map(Self).map_err(err)
    }

    #[staticmethod]
    fn basis(cutoff: usize, m: i64) -> PyResult<Self> {
        ringqpe::WaveState::basis(cutoff, m).map(Self).map_err(err)
    }

    #[getter]
    fn cutoff(&self) -> usize {
        self.0.cutoff()
    }

    #[getter]
    fn internal_dim(&self) -> usize {
        self.0.internal_dim()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn amplitude(&self, m: i64, a: usize) -> Option<Complex64> {
        self.0.get(m, a)
    }

    fn norm(&self) -> f64 {
        self.0.norm_sqr().sqrt()
    }

    fn distance(&self, other: &PyWaveState) -> PyResult<f64> {
        self.0.distance(&other.0).map_err(err)
    }

    /// `(angles, density)` on a `grid`-point ring grid.
    fn density(&self, grid_size: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let g = grid(grid_size)?;
        Ok((g.points().collect(), ringqpe::density_on_grid(&self.0, &g)))
    }

    fn __len__(&self) -> usize {
        self.0.amplitudes().len()
    }
}

/// Exact evolution; returns `(state, removed_global_phase)`.
#[pyfunction]
fn evolve(
    state: &PyWaveState,
    config: &PyRingConfig,
    t: f64,
) -> PyResult<(PyWaveState, Complex64)> {
    let r = ringqpe::evolve(&state.0, &config.0, t).map_err(err)?;
    Ok((PyWaveState(r.state), r.global_phase_removed))
}

#[pyfunction]
fn shift_identity_residual(config: &PyRingConfig, state: &PyWaveState, t: f64) -> PyResult<f64> {
    ringqpe::shift_identity_residual(&config.0, &state.0, t).map_err(err)
}

#[pyfunction]
fn wrap_angle(x: f64) -> PyResult<f64> {
    ringqpe::wrap_angle(x).map_err(err)
}

fn estimate_dict<'py>(py: Python<'py>, e: &ringqpe::PhaseEstimate) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("phase", e.phase)?;
    d.set_item("grid_peak", e.grid_peak)?;
    d.set_item("refined_peak", e.refined_peak)?;
    d.set_item("half_width", e.half_width)?;
    d.set_item("distribution", e.distribution.clone())?;
    Ok(d)
}

/// Ring read-out after one return time.
#[pyfunction]
#[pyo3(signature = (config, cutoff=100, grid_size=1024))]
fn ring_qpe<'py>(
    py: Python<'py>,
    config: &PyRingConfig,
    cutoff: usize,
    grid_size: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let e = qpe::ring_qpe(&config.0, cutoff, &grid(grid_size)?).map_err(err)?;
    estimate_dict(py, &e)
}

/// Outcome probabilities of textbook phase estimation with `t_qubits`.
#[pyfunction]
fn register_qpe_distribution(t_qubits: u32, phase: f64) -> PyResult<Vec<f64>> {
    let spec = qpe::RegisterQpeSpec::new(t_qubits, phase).map_err(err)?;
    Ok(qpe::register_qpe_distribution(&spec))
}

#[pyfunction]
fn flux_from_phase(config: &PyRingConfig, phase: f64) -> PyResult<f64> {
    qpe::flux_from_phase(&config.0, phase).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (config, t_qubits, cutoff=100, grid_size=1024))]
fn compare_ring_vs_register<'py>(
    py: Python<'py>,
    config: &PyRingConfig,
    t_qubits: u32,
    cutoff: usize,
    grid_size: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let c = qpe::compare_ring_vs_register(&config.0, cutoff, t_qubits, &grid(grid_size)?)
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("expected_phase", c.expected_phase)?;
    d.set_item("ring_phase", c.ring_phase)?;
    d.set_item("register_outcome", c.register_outcome)?;
    d.set_item("register_phase", c.register_phase)?;
    d.set_item("difference", c.difference)?;
    d.set_item("tolerance", c.tolerance)?;
    d.set_item("agrees", c.agrees())?;
    Ok(d)
}

/// Seeded position measurements; returns the sampled angles.
#[pyfunction]
#[pyo3(signature = (state, samples, seed, grid_size=1024))]
fn sample_positions(
    state: &PyWaveState,
    samples: usize,
    seed: u64,
    grid_size: usize,
) -> PyResult<Vec<f64>> {
    qpe::sample_positions(&state.0, &grid(grid_size)?, samples, seed)
        .map(|s| s.angles)
        .map_err(err)
}

/// Hermitian `Θ` of a U(N) Aharonov-Bohm holonomy `exp(iΘ)`.
#[pyclass(name = "GaugeField", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGaugeField(GaugeField);

#[pymethods]
impl PyGaugeField {
    /// From a square nested list of complex entries.
    #[staticmethod]
    fn from_matrix(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        let re_im: Vec<f64> = rows.iter().flatten().flat_map(|z| [z.re, z.im]).collect();
        GaugeField::from_row_major(n, &re_im).map(Self).map_err(err)
    }

    /// Coefficients on the generator basis, identity first.
    #[staticmethod]
    fn from_coefficients(dim: usize, coefficients: Vec<f64>) -> PyResult<Self> {
        GaugeField::from_coefficients(dim, &coefficients)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (dim, seed, scale=1.0))]
    fn random(dim: usize, seed: u64, scale: f64) -> PyResult<Self> {
        GaugeField::random(dim, scale, seed).map(Self).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Eigenvalues `θ_b` of `Θ`, ascending.
    fn eigenvalues(&self) -> Vec<f64> {
        self.0.spectrum().values
    }

    /// Eigenphases of `U_AB^k`.
    #[pyo3(signature = (k=1))]
    fn holonomy_phases(&self, k: i32) -> Vec<f64> {
        nonabelian::holonomy(&self.0).power_phases(k)
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        let t = self.0.theta();
        (0..t.nrows())
            .map(|i| (0..t.ncols()).map(|j| t[(i, j)]).collect())
            .collect()
    }
}

/// Phase estimation of `W = U_AB²` on one eigenchannel.
#[pyfunction]
#[pyo3(signature = (gauge, channel, config=None, cutoff=100, grid_size=1024))]
fn nonabelian_qpe<'py>(
    py: Python<'py>,
    gauge: &PyGaugeField,
    channel: usize,
    config: Option<&PyRingConfig>,
    cutoff: usize,
    grid_size: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config.map(|c| c.0).unwrap_or_default();
    let e = nonabelian::nonabelian_qpe(&gauge.0, channel, &cfg, cutoff, &grid(grid_size)?)
        .map_err(err)?;
    estimate_dict(py, &e)
}

/// Both sides of one Poisson-resummed time step: `(lhs, rhs, relative_difference)`.
#[pyfunction]
#[pyo3(signature = (config, dt, dphi, cutoff=200, windings=30, regulator=1e-3))]
fn poisson_step_check(
    config: &PyRingConfig,
    dt: f64,
    dphi: f64,
    cutoff: usize,
    windings: usize,
    regulator: f64,
) -> PyResult<(Complex64, Complex64, f64)> {
    let c = pi::poisson_step_check(&config.0, dt, dphi, cutoff, windings, regulator * dt)
        .map_err(err)?;
    Ok((c.lhs, c.rhs, c.relative_difference))
}

/// Phase-space kernel at one return time: `(angles, values)`.
#[pyfunction]
#[pyo3(signature = (config, steps=3, cutoff=6, grid_size=128))]
fn phase_space_propagator(
    config: &PyRingConfig,
    steps: usize,
    cutoff: usize,
    grid_size: usize,
) -> PyResult<(Vec<f64>, Vec<Complex64>)> {
    let spec = PathSpec::new(steps, 0.0)
        .and_then(|s| s.with_momentum_cutoff(cutoff))
        .map_err(err)?
        .with_grid(grid(grid_size)?);
    let k = pi::phase_space_propagator(&config.0, &spec).map_err(err)?;
    Ok((k.angles, k.values))
}

/// Configuration-space kernel fit: `(residual, fitted_constant, analytic_constant)`.
#[pyfunction]
#[pyo3(signature = (config, steps=3, cutoff=40, grid_size=96, windings=3, regulator=0.5))]
fn config_space_propagator(
    config: &PyRingConfig,
    steps: usize,
    cutoff: usize,
    grid_size: usize,
    windings: usize,
    regulator: f64,
) -> PyResult<(f64, Complex64, Complex64)> {
    let spec = PathSpec::new(steps, 0.0)
        .and_then(|s| s.with_momentum_cutoff(cutoff))
        .and_then(|s| s.with_regulator(regulator))
        .map_err(err)?
        .with_grid(grid(grid_size)?)
        .with_winding_cutoff(windings);
    let f = pi::config_space_propagator(&config.0, &spec).map_err(err)?;
    Ok((f.residual, f.constant, f.analytic_constant))
}

/// One dict per `ħ`: return time, tent cost, critical step and reach `d*`.
#[pyfunction]
#[pyo3(signature = (config, hbar_values, steps=100, epsilon=0.02))]
fn classical_limit_scan<'py>(
    py: Python<'py>,
    config: &PyRingConfig,
    hbar_values: Vec<f64>,
    steps: usize,
    epsilon: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let scan = pi::classical_limit_scan(&config.0, &hbar_values, steps, epsilon).map_err(err)?;
    scan.rows
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("hbar", r.hbar)?;
            d.set_item("return_time", r.return_time)?;
            d.set_item("tent_cost", r.tent_cost)?;
            d.set_item("critical_step", r.critical_step)?;
            d.set_item("d_star", r.max_deviation)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
#[pyo3(name = "ringqpe")]
fn ringqpe_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRingConfig>()?;
    m.add_class::<PyWaveState>()?;
    m.add_class::<PyGaugeField>()?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(shift_identity_residual, m)?)?;
    m.add_function(wrap_pyfunction!(wrap_angle, m)?)?;
    m.add_function(wrap_pyfunction!(ring_qpe, m)?)?;
    m.add_function(wrap_pyfunction!(register_qpe_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(flux_from_phase, m)?)?;
    m.add_function(wrap_pyfunction!(compare_ring_vs_register, m)?)?;
    m.add_function(wrap_pyfunction!(sample_positions, m)?)?;
    m.add_function(wrap_pyfunction!(nonabelian_qpe, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_step_check, m)?)?;
    m.add_function(wrap_pyfunction!(phase_space_propagator, m)?)?;
    m.add_function(wrap_pyfunction!(config_space_propagator, m)?)?;
    m.add_function(wrap_pyfunction!(classical_limit_scan, m)?)?;
    Ok(())
}
