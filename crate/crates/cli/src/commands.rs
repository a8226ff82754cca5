//! One function per subcommand. Each writes its files through a [`Sink`]
//! and returns a JSON summary plus any tolerance failures.

use std::f64::consts::{PI, SQRT_2, TAU};

use ringqpe::nonabelian::{holonomy, nonabelian_qpe};
use ringqpe::path_integral::{
    classical_limit_scan, config_space_propagator, minimizing_path, phase_space_propagator,
    poisson_step_check, spectral_propagator, tent_perturbation, winding_dominance, ClassicalScan,
    PathSpec,
};
use ringqpe::qpe::{compare_ring_vs_register, flux_from_phase, ring_qpe, sample_positions};
use ringqpe::{
    angle_difference, evolve, localized_state, return_time, shift_angle, wavefunction_on_grid,
    wrap_angle, AngleGrid, Complex64,
};
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{num, Plot, Series, Sink};

pub const POISSON_TOLERANCE: f64 = 1e-6;
pub const PHASE_SPACE_TOLERANCE: f64 = 1e-6;
pub const CONFIG_SPACE_TOLERANCE_SINGLE: f64 = 1e-3;
pub const CONFIG_SPACE_TOLERANCE: f64 = 5e-2;
pub const SCAN_TOLERANCE: f64 = 1e-6;
const DOMINANCE_HALVINGS: usize = 8;

#[derive(Debug)]
pub struct Report {
    pub summary: Value,
    pub failures: Vec<String>,
}

impl Report {
    fn new<T: Serialize>(summary: &T, failures: Vec<String>) -> CliResult<Self> {
        let summary = serde_json::to_value(summary).map_err(|e| CliError::Io(e.to_string()))?;
        Ok(Self { summary, failures })
    }
}

fn sink(config: &RunConfig) -> CliResult<Sink> {
    Sink::new(&config.output.dir, &config.output.formats)
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn peak_angle(grid: &AngleGrid, density: &[f64]) -> f64 {
    let mut best = 0;
    for (i, d) in density.iter().enumerate() {
        if *d > density[best] {
            best = i;
        }
    }
    grid.point(best)
}

#[derive(Serialize)]
struct EvolveSummary {
    command: &'static str,
    flux: f64,
    cutoff: usize,
    grid: usize,
    return_time: f64,
    times: Vec<f64>,
    peak_angles: Vec<f64>,
    norms: Vec<f64>,
    files: Vec<String>,
}

/// Snapshots of the localized state at each requested time.
pub fn evolve_cmd(config: &RunConfig) -> CliResult<Report> {
    let ring = config.ring()?;
    let grid = config.grid()?;
    let l = config.numerics.cutoff;
    let t_r = return_time(&ring);
    let times = config
        .numerics
        .times
        .clone()
        .unwrap_or_else(|| vec![0.0, t_r / SQRT_2, t_r]);
    let start = localized_state(l)?;
    let mut out = sink(config)?;
    let mut peaks = Vec::new();
    let mut norms = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        let evolved = evolve(&start, &ring, t)?;
        norms.push(evolved.state.norm_sqr().sqrt());
        let psi: Vec<Complex64> = wavefunction_on_grid(&evolved.state, &grid)
            .into_iter()
            .map(|v| v[0])
            .collect();
        let density: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
        peaks.push(peak_angle(&grid, &density));
        let rows = grid
            .points()
            .zip(&psi)
            .map(|(phi, z)| vec![num(phi), num(z.re), num(z.im), num(z.norm_sqr())]);
        out.csv(
            &format!("evolve_t{k}.csv"),
            &["phi", "re_psi", "im_psi", "density"],
            rows,
        )?;
        let plot = Plot::new(&format!("wave function at t = {t:.6}"), "phi (rad)", "psi")
            .with(Series::new(
                "Re psi",
                grid.points().zip(psi.iter().map(|z| z.re)),
            ))
            .with(Series::new(
                "Im psi",
                grid.points().zip(psi.iter().map(|z| z.im)),
            ));
        out.svg(&format!("evolve_t{k}.svg"), &plot)?;
    }
    let summary = EvolveSummary {
        command: "evolve",
        flux: ring.flux(),
        cutoff: l,
        grid: grid.size(),
        return_time: t_r,
        times,
        peak_angles: peaks,
        norms,
        files: out.written().to_vec(),
    };
    out.json("evolve.json", &summary)?;
    Report::new(&summary, Vec::new())
}

#[derive(Serialize)]
struct RegisterSummary {
    t_qubits: u32,
    register_peak: usize,
    register_phase: f64,
    ring_register_difference: f64,
    register_tolerance: f64,
}

#[derive(Serialize)]
struct QpeSummary {
    command: &'static str,
    flux: f64,
    phase_estimate: f64,
    expected_phase: f64,
    abs_error: f64,
    tolerance: f64,
    flux_principal: Option<f64>,
    half_width: f64,
    #[serde(flatten)]
    register: Option<RegisterSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample_mode: Option<f64>,
    files: Vec<String>,
}

/// Ring read-out of the flux phase, optionally next to the register oracle.
pub fn qpe_cmd(config: &RunConfig) -> CliResult<Report> {
    let ring = config.ring()?;
    let grid = config.grid()?;
    let l = config.numerics.cutoff;
    let estimate = ring_qpe(&ring, l, &grid)?;
    let expected = wrap_angle(shift_angle(&ring))?;
    let abs_error = angle_difference(estimate.phase, expected).abs();
    let tolerance = grid.spacing();
    let mut failures = Vec::new();
    if abs_error > tolerance {
        failures.push(format!("abs_error {abs_error:e} > {tolerance:e}"));
    }
    let mut out = sink(config)?;
    out.csv(
        "qpe_distribution.csv",
        &["phi", "density"],
        grid.points()
            .zip(&estimate.distribution)
            .map(|(phi, d)| vec![num(phi), num(*d)]),
    )?;
    out.svg(
        "qpe_distribution.svg",
        &Plot::new(
            "angle distribution after one return time",
            "phi (rad)",
            "density",
        )
        .with(Series::new(
            "density",
            grid.points().zip(estimate.distribution.iter().copied()),
        )),
    )?;

    let register = match config.numerics.t_qubits {
        Some(t) => {
            let cmp = compare_ring_vs_register(&ring, l, t, &grid)?;
            if !cmp.agrees() {
                failures.push(format!(
                    "ring vs register difference {:e} > {:e}",
                    cmp.difference, cmp.tolerance
                ));
            }
            out.csv(
                "qpe_register.csv",
                &["outcome", "phase", "probability"],
                cmp.register_distribution.iter().enumerate().map(|(k, p)| {
                    vec![
                        k.to_string(),
                        num(TAU * k as f64 / cmp.register_distribution.len() as f64),
                        num(*p),
                    ]
                }),
            )?;
            Some(RegisterSummary {
                t_qubits: t,
                register_peak: cmp.register_outcome,
                register_phase: cmp.register_phase,
                ring_register_difference: cmp.difference,
                register_tolerance: cmp.tolerance,
            })
        }
        None => None,
    };

    let sample_mode = if config.numerics.samples > 0 {
        let evolved = evolve(&localized_state(l)?, &ring, return_time(&ring))?;
        let sample = sample_positions(
            &evolved.state,
            &grid,
            config.numerics.samples,
            config.numerics.seed,
        )?;
        let counts = sample.histogram(&grid);
        out.csv(
            "qpe_samples.csv",
            &["phi", "count"],
            grid.points()
                .zip(&counts)
                .map(|(phi, c)| vec![num(phi), c.to_string()]),
        )?;
        Some(sample.mode(&grid))
    } else {
        None
    };

    let summary = QpeSummary {
        command: "qpe",
        flux: ring.flux(),
        phase_estimate: estimate.phase,
        expected_phase: expected,
        abs_error,
        tolerance,
        flux_principal: flux_from_phase(&ring, estimate.phase).ok(),
        half_width: estimate.half_width,
        register,
        sample_mode,
        files: out.written().to_vec(),
    };
    out.json("qpe.json", &summary)?;
    Report::new(&summary, failures)
}

#[derive(Serialize)]
struct ChannelSummary {
    channel: usize,
    /// Estimate of the W eigenphase, `wrap(-peak_angle)`.
    phase_estimate: f64,
    peak_angle: f64,
    expected_phase: f64,
    abs_error: f64,
}

#[derive(Serialize)]
struct NonabelianSummary {
    command: &'static str,
    dim: usize,
    theta_eigenvalues: Vec<f64>,
    w_eigenphases: Vec<f64>,
    channels: Vec<ChannelSummary>,
    tolerance: f64,
    files: Vec<String>,
}

/// Per-channel estimation of the eigenphases of `W = U_AB²`.
pub fn nonabelian_cmd(config: &RunConfig) -> CliResult<Report> {
    let ring = config.ring()?;
    let grid = config.grid()?;
    let gauge = config.gauge_field()?;
    let l = config.numerics.cutoff;
    let hol = holonomy(&gauge);
    let w_phases = hol.power_phases(2);
    let tolerance = grid.spacing();
    let mut out = sink(config)?;
    let mut channels = Vec::new();
    let mut failures = Vec::new();
    let mut plot = Plot::new("angle distribution per channel", "phi (rad)", "density");
    for (b, &expected) in w_phases.iter().enumerate() {
        let est = nonabelian_qpe(&gauge, b, &ring, l, &grid)?;
        let abs_error = angle_difference(est.phase, expected).abs();
        if abs_error > tolerance {
            failures.push(format!(
                "channel {b}: abs_error {abs_error:e} > {tolerance:e}"
            ));
        }
        out.csv(
            &format!("nonabelian_channel{b}.csv"),
            &["phi", "density"],
            grid.points()
                .zip(&est.distribution)
                .map(|(phi, d)| vec![num(phi), num(*d)]),
        )?;
        plot = plot.with(Series::new(
            &format!("channel {b}"),
            grid.points().zip(est.distribution.iter().copied()),
        ));
        channels.push(ChannelSummary {
            channel: b,
            phase_estimate: est.phase,
            peak_angle: est.refined_peak,
            expected_phase: expected,
            abs_error,
        });
    }
    out.svg("nonabelian.svg", &plot)?;
    let summary = NonabelianSummary {
        command: "nonabelian",
        dim: gauge.dim(),
        theta_eigenvalues: hol.theta_values.clone(),
        w_eigenphases: w_phases,
        channels,
        tolerance,
        files: out.written().to_vec(),
    };
    out.json("nonabelian.json", &summary)?;
    Report::new(&summary, failures)
}

#[derive(Serialize)]
struct PoissonSummary {
    command: &'static str,
    dt: f64,
    dphi: f64,
    eta: f64,
    cutoff: usize,
    windings: usize,
    lhs: [f64; 2],
    rhs: [f64; 2],
    relative_difference: f64,
    tolerance: f64,
    dominance_dt: Vec<f64>,
    dominance: Vec<f64>,
    dominance_decreasing: bool,
    files: Vec<String>,
}

/// Momentum sum of one time step against its winding-sum dual, and the
/// `n = ±1` to `n = 0` ratio over successive halvings of `δt`.
pub fn check_poisson_cmd(config: &RunConfig) -> CliResult<Report> {
    let ring = config.ring()?;
    let n = &config.numerics;
    let dt = n.poisson_dt;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(CliError::at(
            "numerics.poisson_dt",
            "must be finite and > 0",
        ));
    }
    if !(n.poisson_regulator > 0.0) {
        return Err(CliError::at("numerics.poisson_regulator", "must be > 0"));
    }
    let eta = n.poisson_regulator * dt;
    let check = poisson_step_check(
        &ring,
        dt,
        n.poisson_dphi,
        n.poisson_cutoff,
        n.poisson_windings,
        eta,
    )?;
    let dts: Vec<f64> = (0..DOMINANCE_HALVINGS)
        .map(|k| dt / 2f64.powi(k as i32))
        .collect();
    let ratios = dts
        .iter()
        .map(|&d| winding_dominance(&ring, d, n.poisson_dphi, n.poisson_regulator * d))
        .collect::<Result<Vec<f64>, _>>()?;
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);

    let mut failures = Vec::new();
    if !(check.relative_difference <= POISSON_TOLERANCE) {
        failures.push(format!(
            "relative difference {:e} > {POISSON_TOLERANCE:e}",
            check.relative_difference
        ));
    }
    if !decreasing {
        failures.push("winding ratio does not decrease over dt halvings".into());
    }
    let mut out = sink(config)?;
    out.csv(
        "poisson_dominance.csv",
        &["dt", "winding_ratio"],
        dts.iter().zip(&ratios).map(|(d, r)| vec![num(*d), num(*r)]),
    )?;
    out.svg(
        "poisson_dominance.svg",
        &Plot::new("|t(n=±1)| / |t(n=0)|", "log2(dt)", "log10 ratio").with(Series::new(
            "ratio",
            dts.iter().zip(&ratios).map(|(d, r)| (d.log2(), r.log10())),
        )),
    )?;
    let summary = PoissonSummary {
        command: "pathint check-poisson",
        dt,
        dphi: n.poisson_dphi,
        eta,
        cutoff: n.poisson_cutoff,
        windings: n.poisson_windings,
        lhs: pair(check.lhs),
        rhs: pair(check.rhs),
        relative_difference: check.relative_difference,
        tolerance: POISSON_TOLERANCE,
        dominance_dt: dts,
        dominance: ratios,
        dominance_decreasing: decreasing,
        files: out.written().to_vec(),
    };
    out.json("poisson.json", &summary)?;
    Report::new(&summary, failures)
}

#[derive(Serialize)]
struct PhaseSpaceSummary {
    cutoff: usize,
    grid: usize,
    residual: f64,
    tolerance: f64,
}

#[derive(Serialize)]
struct ConfigSpaceSummary {
    cutoff: usize,
    grid: usize,
    windings: usize,
    regulator: f64,
    residual: f64,
    tolerance: f64,
    fitted_constant: [f64; 2],
    analytic_constant: [f64; 2],
}

#[derive(Serialize)]
struct PropagatorSummary {
    command: &'static str,
    steps: usize,
    phase_space: PhaseSpaceSummary,
    config_space: ConfigSpaceSummary,
    files: Vec<String>,
}

fn path_grid(size: usize, path: &str) -> CliResult<AngleGrid> {
    AngleGrid::new(size).map_err(|e| CliError::at(path, e))
}

/// Phase-space and configuration-space kernels at one return time against
/// the spectral kernel.
pub fn propagator_cmd(config: &RunConfig) -> CliResult<Report> {
    let ring = config.ring()?;
    let n = &config.numerics;
    let steps = n.path_steps;
    let ps = PathSpec::new(steps, 0.0)
        .map_err(|e| CliError::at("numerics.path_steps", e))?
        .with_momentum_cutoff(n.path_cutoff)
        .map_err(|e| CliError::at("numerics.path_cutoff", e))?
        .with_grid(path_grid(n.path_grid, "numerics.path_grid")?);
    let cs = ps
        .with_momentum_cutoff(n.config_cutoff)
        .map_err(|e| CliError::at("numerics.config_cutoff", e))?
        .with_grid(path_grid(n.config_grid, "numerics.config_grid")?)
        .with_winding_cutoff(n.winding_cutoff)
        .with_regulator(n.config_regulator)
        .map_err(|e| CliError::at("numerics.config_regulator", e))?;

    let phase_space = phase_space_propagator(&ring, &ps)?;
    let fit = config_space_propagator(&ring, &cs)?;
    let exact = spectral_propagator(
        &ring,
        n.path_cutoff,
        Complex64::new(return_time(&ring), 0.0),
        0.0,
        &phase_space.angles,
    );
    let ps_residual = phase_space.relative_l2(&exact);
    let cs_tolerance = if steps == 1 {
        CONFIG_SPACE_TOLERANCE_SINGLE
    } else {
        CONFIG_SPACE_TOLERANCE
    };
    let mut failures = Vec::new();
    if !(ps_residual <= PHASE_SPACE_TOLERANCE) {
        failures.push(format!(
            "phase-space residual {ps_residual:e} > {PHASE_SPACE_TOLERANCE:e}"
        ));
    }
    if !(fit.residual <= cs_tolerance) {
        failures.push(format!(
            "config-space residual {:e} > {cs_tolerance:e}",
            fit.residual
        ));
    }

    let mut out = sink(config)?;
    out.csv(
        "propagator_phase_space.csv",
        &["phi", "re_spectral", "im_spectral", "re_path", "im_path"],
        (0..exact.angles.len()).map(|i| {
            let (e, p) = (exact.values[i], phase_space.values[i]);
            vec![
                num(exact.angles[i]),
                num(e.re),
                num(e.im),
                num(p.re),
                num(p.im),
            ]
        }),
    )?;
    let fitted: Vec<Complex64> = fit
        .config_space
        .values
        .iter()
        .map(|v| v * fit.constant)
        .collect();
    out.csv(
        "propagator_config_space.csv",
        &[
            "phi",
            "re_spectral",
            "im_spectral",
            "re_fitted",
            "im_fitted",
        ],
        (0..fit.exact.angles.len()).map(|i| {
            let (e, p) = (fit.exact.values[i], fitted[i]);
            vec![
                num(fit.exact.angles[i]),
                num(e.re),
                num(e.im),
                num(p.re),
                num(p.im),
            ]
        }),
    )?;
    out.svg(
        "propagator.svg",
        &Plot::new("|K(phi, t_R)|", "phi (rad)", "|K|")
            .with(Series::new(
                "spectral",
                exact
                    .angles
                    .iter()
                    .copied()
                    .zip(exact.values.iter().map(|v| v.norm())),
            ))
            .with(Series::new(
                "phase space",
                phase_space
                    .angles
                    .iter()
                    .copied()
                    .zip(phase_space.values.iter().map(|v| v.norm())),
            ))
            .with(Series::new(
                "config space (fitted, regulated)",
                fit.exact
                    .angles
                    .iter()
                    .copied()
                    .zip(fitted.iter().map(|v| v.norm())),
            )),
    )?;
    let summary = PropagatorSummary {
        command: "pathint propagator",
        steps,
        phase_space: PhaseSpaceSummary {
            cutoff: n.path_cutoff,
            grid: n.path_grid,
            residual: ps_residual,
            tolerance: PHASE_SPACE_TOLERANCE,
        },
        config_space: ConfigSpaceSummary {
            cutoff: n.config_cutoff,
            grid: n.config_grid,
            windings: n.winding_cutoff,
            regulator: n.config_regulator,
            residual: fit.residual,
            tolerance: cs_tolerance,
            fitted_constant: pair(fit.constant),
            analytic_constant: pair(fit.analytic_constant),
        },
        files: out.written().to_vec(),
    };
    out.json("propagator.json", &summary)?;
    Report::new(&summary, failures)
}

#[derive(Serialize)]
struct ScanRowSummary {
    hbar: f64,
    return_time: f64,
    tent_cost: f64,
    predicted_cost: f64,
    critical_step: f64,
    d_star: f64,
}

#[derive(Serialize)]
struct ScanSummary {
    command: &'static str,
    steps: usize,
    epsilon: f64,
    rows: Vec<ScanRowSummary>,
    d_star_predicted: f64,
    max_d_star_error: f64,
    max_return_time_error: f64,
    tolerance: f64,
    files: Vec<String>,
}

/// Return time and tent-family reach for a descending list of `ħ`.
pub fn classical_scan_cmd(config: &RunConfig) -> CliResult<Report> {
    let ring = config.ring()?;
    let n = &config.numerics;
    let scan = classical_limit_scan(&ring, &n.scan_hbar, n.scan_steps, n.scan_epsilon)
        .map_err(|e| CliError::at("numerics.scan_hbar", e))?;
    let ClassicalScan {
        steps,
        epsilon,
        rows,
    } = scan;
    let d_pred = ClassicalScan::predicted_deviation();
    let predicted_cost = (steps * steps) as f64 * epsilon * epsilon / (8.0 * PI);
    // t_R ħ is ħ-independent
    let tr_hbar = rows[0].return_time * rows[0].hbar;
    let max_d_err = rows
        .iter()
        .map(|r| (r.max_deviation - d_pred).abs())
        .fold(0.0, f64::max);
    let max_tr_err = rows
        .iter()
        .map(|r| (r.return_time * r.hbar / tr_hbar - 1.0).abs())
        .fold(0.0, f64::max);
    let mut failures = Vec::new();
    if !(max_d_err <= SCAN_TOLERANCE) {
        failures.push(format!("d* deviates from sqrt(8 pi)/2 by {max_d_err:e}"));
    }
    if !(max_tr_err <= SCAN_TOLERANCE) {
        failures.push(format!(
            "t_R is not proportional to 1/hbar ({max_tr_err:e})"
        ));
    }

    let mut out = sink(config)?;
    out.csv(
        "scan.csv",
        &[
            "hbar",
            "return_time",
            "tent_cost",
            "predicted_cost",
            "critical_step",
            "d_star",
        ],
        rows.iter().map(|r| {
            vec![
                num(r.hbar),
                num(r.return_time),
                num(r.tent_cost),
                num(predicted_cost),
                num(r.critical_step),
                num(r.max_deviation),
            ]
        }),
    )?;
    // stationary path and the critical tent for the smallest ħ
    let last = rows.last().expect("scan is non-empty");
    let cfg = ring.with_hbar(last.hbar)?;
    let min = minimizing_path(&cfg, &PathSpec::revival(&cfg, steps)?)?;
    let tent = tent_perturbation(steps, last.critical_step)?;
    let mut bumped = vec![min.angles[0]];
    for (j, inc) in min.increments().iter().enumerate() {
        bumped.push(bumped[j] + inc + tent[j]);
    }
    out.csv(
        "scan_paths.csv",
        &["step", "minimizing_unwrapped", "tent_unwrapped"],
        min.angles
            .iter()
            .zip(&bumped)
            .enumerate()
            .map(|(j, (a, b))| vec![j.to_string(), num(*a), num(*b)]),
    )?;
    out.svg(
        "scan_paths.svg",
        &Plot::new(
            "stationary path and critical tent",
            "step",
            "phi (unwrapped rad)",
        )
        .with(Series::new(
            "minimizing",
            min.angles.iter().enumerate().map(|(j, a)| (j as f64, *a)),
        ))
        .with(Series::new(
            "tent",
            bumped.iter().enumerate().map(|(j, a)| (j as f64, *a)),
        )),
    )?;
    let summary = ScanSummary {
        command: "pathint classical-scan",
        steps,
        epsilon,
        rows: rows
            .iter()
            .map(|r| ScanRowSummary {
                hbar: r.hbar,
                return_time: r.return_time,
                tent_cost: r.tent_cost,
                predicted_cost,
                critical_step: r.critical_step,
                d_star: r.max_deviation,
            })
            .collect(),
        d_star_predicted: d_pred,
        max_d_star_error: max_d_err,
        max_return_time_error: max_tr_err,
        tolerance: SCAN_TOLERANCE,
        files: out.written().to_vec(),
    };
    out.json("scan.json", &summary)?;
    Report::new(&summary, failures)
}
