//! Reading a phase off an angle distribution.

use serde::Serialize;

use crate::angle::{wrap, AngleGrid};
use crate::error::{Error, Result};

/// Phase read out from a measured angle distribution.
///
/// `refined_peak` is the location of the density maximum on the ring;
/// `phase` is the estimate expressed in the convention of the pipeline
/// that produced it (see [`crate::qpe::ring_qpe`] and
/// [`crate::nonabelian::nonabelian_qpe`]).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseEstimate {
    pub phase: f64,
    pub grid_peak: usize,
    pub refined_peak: f64,
    pub half_width: f64,
    /// Probability density at each grid point; integrates to 1 with bin width `2π/G`.
    pub distribution: Vec<f64>,
}

/// Peak of a density sampled on `grid`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Peak {
    pub index: usize,
    pub refined: f64,
    pub half_width: f64,
}

/// Index of the largest entry; ties resolve to the smallest index.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Sub-bin peak offset from a parabola through the log-density at the
/// argmax and its two circular neighbours, in units of bins.
fn parabolic_offset(density: &[f64], i: usize) -> f64 {
    let g = density.len();
    let (l, c, r) = (density[(i + g - 1) % g], density[i], density[(i + 1) % g]);
    if l <= 0.0 || r <= 0.0 || c <= 0.0 {
        return 0.0;
    }
    let (yl, yc, yr) = (l.ln(), c.ln(), r.ln());
    let denom = yl - 2.0 * yc + yr;
    if denom >= 0.0 {
        return 0.0;
    }
    (0.5 * (yl - yr) / denom).clamp(-0.5, 0.5)
}

/// Distance in bins from `i` to the first local minimum walking in `step` direction.
fn bins_to_minimum(density: &[f64], i: usize, forward: bool) -> usize {
    let g = density.len();
    let next = |k: usize| {
        if forward {
            (k + 1) % g
        } else {
            (k + g - 1) % g
        }
    };
    let mut k = i;
    for steps in 1..g {
        let n = next(k);
        if density[n] > density[k] {
            return steps - 1;
        }
        k = n;
    }
    g / 2
}

pub(crate) fn locate_peak(grid: &AngleGrid, density: &[f64]) -> Result<Peak> {
    if density.len() != grid.size() {
        return Err(Error::ShapeMismatch(format!(
            "density has {} entries for a grid of {}",
            density.len(),
            grid.size()
        )));
    }
    if !density.iter().any(|&d| d > 0.0) {
        return Err(Error::DegenerateDensity);
    }
    let index = argmax(density);
    let offset = parabolic_offset(density, index);
    let refined = wrap(grid.point(index) + offset * grid.spacing());
    let bins = bins_to_minimum(density, index, true).min(bins_to_minimum(density, index, false));
    Ok(Peak {
        index,
        refined,
        half_width: bins as f64 * grid.spacing(),
    })
}
