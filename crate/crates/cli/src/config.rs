//! Run configuration: a TOML file with `[physics]`, `[gauge]`, `[numerics]`
//! and `[output]` sections. Every key is optional; unknown keys are errors.

use std::path::{Path, PathBuf};

use ringqpe::nonabelian::GaugeField;
use ringqpe::{AngleGrid, RingConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub physics: Physics,
    pub gauge: Option<Gauge>,
    pub numerics: Numerics,
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Physics {
    pub hbar: f64,
    pub mass: f64,
    pub radius: f64,
    pub charge: f64,
    pub flux: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            radius: 1.0,
            charge: 1.0,
            flux: 0.7,
        }
    }
}

/// Exactly one of `coefficients`, `matrix_re` or `random = true`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Gauge {
    pub dim: usize,
    /// Real coefficients on the generator basis (identity first), `dim²` of them.
    pub coefficients: Option<Vec<f64>>,
    /// Real part of `Θ`, rows.
    pub matrix_re: Option<Vec<Vec<f64>>>,
    /// Imaginary part of `Θ`, rows; zero when absent.
    pub matrix_im: Option<Vec<Vec<f64>>>,
    /// Seeded random Hermitian `Θ` (seed from `numerics.seed`).
    pub random: bool,
    pub scale: f64,
}

impl Default for Gauge {
    fn default() -> Self {
        Self {
            dim: 1,
            coefficients: None,
            matrix_re: None,
            matrix_im: None,
            random: false,
            scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    pub cutoff: usize,
    pub grid: usize,
    pub samples: usize,
    pub seed: u64,
    pub t_qubits: Option<u32>,
    /// Evolution times; `{0, t_R/√2, t_R}` when absent.
    pub times: Option<Vec<f64>>,

    pub path_steps: usize,
    pub path_cutoff: usize,
    pub path_grid: usize,
    pub config_cutoff: usize,
    pub config_grid: usize,
    pub winding_cutoff: usize,
    /// `η/δt` for the configuration-space quadrature.
    pub config_regulator: f64,

    pub poisson_dt: f64,
    pub poisson_dphi: f64,
    pub poisson_cutoff: usize,
    pub poisson_windings: usize,
    pub poisson_regulator: f64,

    pub scan_hbar: Vec<f64>,
    pub scan_steps: usize,
    pub scan_epsilon: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            cutoff: 100,
            grid: 1024,
            samples: 0,
            seed: 0,
            t_qubits: None,
            times: None,
            path_steps: 3,
            path_cutoff: 6,
            path_grid: 128,
            config_cutoff: 40,
            config_grid: 96,
            winding_cutoff: 3,
            config_regulator: 0.5,
            poisson_dt: 1.0,
            poisson_dphi: 0.3,
            poisson_cutoff: 200,
            poisson_windings: 30,
            poisson_regulator: 1e-3,
            scan_hbar: vec![1.0, 0.1, 0.01],
            scan_steps: 100,
            scan_epsilon: 0.02,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(format!(
                "unknown format `{other}` (expected csv, json or svg)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for Output {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Json, Format::Svg],
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> CliResult<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| CliError::Config(e.to_string()))?;
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::at(&path, e.into_inner().message())
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn ring(&self) -> CliResult<RingConfig> {
        let p = &self.physics;
        RingConfig::new(p.hbar, p.mass, p.radius, p.charge, p.flux).map_err(|e| match e {
            ringqpe::Error::InvalidParameter { name, reason } => {
                CliError::at(&format!("physics.{name}"), reason)
            }
            other => CliError::at("physics", other),
        })
    }

    /// Read-out grid, checked against the momentum cutoff.
    pub fn grid(&self) -> CliResult<AngleGrid> {
        let n = &self.numerics;
        if n.cutoff < 1 {
            return Err(CliError::at("numerics.cutoff", "must be >= 1"));
        }
        let grid = AngleGrid::new(n.grid).map_err(|e| CliError::at("numerics.grid", e))?;
        grid.require_resolves(n.cutoff)
            .map_err(|e| CliError::at("numerics.grid", e))?;
        Ok(grid)
    }

    pub fn gauge_field(&self) -> CliResult<GaugeField> {
        let g = self
            .gauge
            .as_ref()
            .ok_or_else(|| CliError::at("gauge", "a [gauge] section is required"))?;
        if g.dim < 1 {
            return Err(CliError::at("gauge.dim", "must be >= 1"));
        }
        let sources = g.coefficients.is_some() as u8 + g.matrix_re.is_some() as u8 + g.random as u8;
        if sources != 1 {
            return Err(CliError::at(
                "gauge",
                "give exactly one of coefficients, matrix_re or random = true",
            ));
        }
        if g.matrix_im.is_some() && g.matrix_re.is_none() {
            return Err(CliError::at("gauge.matrix_im", "needs matrix_re"));
        }
        if let Some(c) = &g.coefficients {
            return GaugeField::from_coefficients(g.dim, c)
                .map_err(|e| CliError::at("gauge.coefficients", e));
        }
        if g.random {
            return GaugeField::random(g.dim, g.scale, self.numerics.seed)
                .map_err(|e| CliError::at("gauge.scale", e));
        }
        let re = g.matrix_re.as_ref().expect("checked above");
        let im = g.matrix_im.clone();
        let n = g.dim;
        check_square(re, n, "gauge.matrix_re")?;
        if let Some(im) = &im {
            check_square(im, n, "gauge.matrix_im")?;
        }
        let mut re_im = Vec::with_capacity(2 * n * n);
        for i in 0..n {
            for j in 0..n {
                re_im.push(re[i][j]);
                re_im.push(im.as_ref().map_or(0.0, |m| m[i][j]));
            }
        }
        GaugeField::from_row_major(n, &re_im).map_err(|e| CliError::at("gauge.matrix_re", e))
    }

    /// Checks everything every command needs.
    pub fn validate(&self) -> CliResult<()> {
        self.ring()?;
        self.grid()?;
        if self.output.formats.is_empty() {
            return Err(CliError::at("output.formats", "empty"));
        }
        if let Some(times) = &self.numerics.times {
            if times.is_empty() {
                return Err(CliError::at("numerics.times", "empty"));
            }
            if let Some(i) = times.iter().position(|t| !(*t >= 0.0) || !t.is_finite()) {
                return Err(CliError::at(
                    &format!("numerics.times[{i}]"),
                    "must be finite and >= 0",
                ));
            }
        }
        Ok(())
    }
}

fn check_square(rows: &[Vec<f64>], n: usize, path: &str) -> CliResult<()> {
    if rows.len() != n {
        return Err(CliError::at(
            path,
            format!("{} rows, expected {n}", rows.len()),
        ));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(CliError::at(
                &format!("{path}[{i}]"),
                format!("{} entries, expected {n}", row.len()),
            ));
        }
    }
    Ok(())
}
