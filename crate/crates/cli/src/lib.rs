//! Command-line runs of the ring phase-estimation simulator.
//!
//! Exit codes: 0 success, 1 config error, 2 I/O error, 3 cost guard,
//! 4 tolerance failure.

// `!(x > 0.0)` rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::Report;
pub use config::{Format, RunConfig};
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "ringqpe",
    version,
    about = "Aharonov-Bohm ring as a phase-estimation device"
)]
pub struct Cli {
    /// TOML run configuration; flags override its keys.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Comma-separated subset of csv,json,svg.
    #[arg(long, global = true, value_delimiter = ',', value_name = "LIST")]
    pub format: Option<Vec<Format>>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct RingArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub flux: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Momentum cutoff l.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Read-out grid size G.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wave function snapshots of the localized state.
    Evolve {
        #[command(flatten)]
        ring: RingArgs,
        /// Comma-separated times (default 0, t_R/√2, t_R).
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
    },
    /// Flux phase read off the ring after one return time.
    Qpe {
        #[command(flatten)]
        ring: RingArgs,
        /// Also run the register oracle with this many qubits.
        #[arg(long)]
        t_qubits: Option<u32>,
        /// Seeded position measurements to draw.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Per-channel estimation for a U(N) gauge field.
    Nonabelian {
        #[command(flatten)]
        ring: RingArgs,
    },
    /// Path-integral checks.
    Pathint {
        #[command(subcommand)]
        check: Pathint,
    },
}

#[derive(Debug, Subcommand)]
pub enum Pathint {
    /// One time step: momentum sum against winding sum.
    CheckPoisson {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        dphi: Option<f64>,
        /// Momentum cutoff of the step sum.
        #[arg(long)]
        poisson_cutoff: Option<usize>,
        #[arg(long)]
        windings: Option<usize>,
        /// η as a fraction of δt.
        #[arg(long)]
        regulator: Option<f64>,
    },
    /// Discretized kernels against the spectral kernel.
    Propagator {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        windings: Option<usize>,
        /// η/δt for the configuration-space quadrature.
        #[arg(long)]
        regulator: Option<f64>,
    },
    /// Return time and tent reach over ħ.
    ClassicalScan {
        #[command(flatten)]
        ring: RingArgs,
        /// Comma-separated, strictly descending.
        #[arg(long, value_delimiter = ',')]
        hbar_values: Option<Vec<f64>>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn apply_ring(config: &mut RunConfig, args: &RingArgs) {
    set(&mut config.physics.flux, args.flux);
    set(&mut config.physics.hbar, args.hbar);
    set(&mut config.numerics.cutoff, args.cutoff);
    set(&mut config.numerics.grid, args.grid);
}

/// Loads the config file (if any) and applies flag overrides.
pub fn resolve(cli: &Cli) -> CliResult<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    set(&mut config.output.dir, cli.out.clone());
    set(&mut config.output.formats, cli.format.clone());
    set(&mut config.numerics.seed, cli.seed);
    match &cli.command {
        Command::Evolve { ring, times } => {
            apply_ring(&mut config, ring);
            if times.is_some() {
                config.numerics.times = times.clone();
            }
        }
        Command::Qpe {
            ring,
            t_qubits,
            samples,
        } => {
            apply_ring(&mut config, ring);
            if t_qubits.is_some() {
                config.numerics.t_qubits = *t_qubits;
            }
            set(&mut config.numerics.samples, *samples);
        }
        Command::Nonabelian { ring } => apply_ring(&mut config, ring),
        Command::Pathint { check } => match check {
            Pathint::CheckPoisson {
                ring,
                dt,
                dphi,
                poisson_cutoff,
                windings,
                regulator,
            } => {
                apply_ring(&mut config, ring);
                set(&mut config.numerics.poisson_dt, *dt);
                set(&mut config.numerics.poisson_dphi, *dphi);
                set(&mut config.numerics.poisson_cutoff, *poisson_cutoff);
                set(&mut config.numerics.poisson_windings, *windings);
                set(&mut config.numerics.poisson_regulator, *regulator);
            }
            Pathint::Propagator {
                ring,
                steps,
                windings,
                regulator,
            } => {
                apply_ring(&mut config, ring);
                set(&mut config.numerics.path_steps, *steps);
                set(&mut config.numerics.winding_cutoff, *windings);
                set(&mut config.numerics.config_regulator, *regulator);
            }
            Pathint::ClassicalScan {
                ring,
                hbar_values,
                steps,
                epsilon,
            } => {
                apply_ring(&mut config, ring);
                set(&mut config.numerics.scan_hbar, hbar_values.clone());
                set(&mut config.numerics.scan_steps, *steps);
                set(&mut config.numerics.scan_epsilon, *epsilon);
            }
        },
    }
    config.validate()?;
    Ok(config)
}

pub fn run(cli: &Cli) -> CliResult<Report> {
    let config = resolve(cli)?;
    match &cli.command {
        Command::Evolve { .. } => commands::evolve_cmd(&config),
        Command::Qpe { .. } => commands::qpe_cmd(&config),
        Command::Nonabelian { .. } => commands::nonabelian_cmd(&config),
        Command::Pathint { check } => match check {
            Pathint::CheckPoisson { .. } => commands::check_poisson_cmd(&config),
            Pathint::Propagator { .. } => commands::propagator_cmd(&config),
            Pathint::ClassicalScan { .. } => commands::classical_scan_cmd(&config),
        },
    }
}
