//! Angles on the ring and the uniform measurement grid.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Reduces an angle to the half-open interval `[-π, π)`.
///
/// Values already in range are returned unchanged, so the map is idempotent
/// bit for bit. `π` itself maps to `-π`.
pub fn wrap_angle(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite("angle"));
    }
    Ok(wrap(x))
}

/// Infallible variant of [`wrap_angle`] for internally produced angles.
pub(crate) fn wrap(x: f64) -> f64 {
    if (-PI..PI).contains(&x) {
        return x;
    }
    let r = (x + PI).rem_euclid(TAU) - PI;
    if (-PI..PI).contains(&r) {
        r
    } else {
        // rem_euclid may round up to the modulus itself
        -PI
    }
}

/// Signed circular distance `a - b` reduced to `[-π, π)`.
pub fn angle_difference(a: f64, b: f64) -> f64 {
    wrap(a - b)
}

/// Uniform grid `φ_i = -π + 2πi/G` on the ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleGrid {
    size: usize,
}

impl AngleGrid {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(invalid(
                "grid size",
                format!("need at least 2 points, got {size}"),
            ));
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Bin width `2π/G`.
    pub fn spacing(&self) -> f64 {
        TAU / self.size as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        -PI + TAU * i as f64 / self.size as f64
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.size).map(|i| self.point(i))
    }

    /// Index of the grid point closest to `phi` on the circle.
    pub fn nearest_index(&self, phi: f64) -> usize {
        let x = (wrap(phi) + PI) / self.spacing();
        (x.round() as usize) % self.size
    }

    /// Enforces the Nyquist margin `G ≥ 4l + 4` used by the high-level pipelines.
    pub fn require_resolves(&self, cutoff: usize) -> Result<()> {
        let required = 4 * cutoff + 4;
        if self.size < required {
            return Err(Error::GridTooCoarse {
                grid: self.size,
                cutoff,
                required,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wrap_examples() {
        assert_eq!(wrap_angle(0.0).unwrap(), 0.0);
        assert!((wrap_angle(3.0 * PI).unwrap() + PI).abs() < 1e-12);
        assert_eq!(wrap_angle(-1.4).unwrap(), -1.4);
        assert_eq!(wrap_angle(PI).unwrap(), -PI);
        assert!((wrap_angle(-8.0).unwrap() - (-8.0 + TAU)).abs() < 1e-15);
    }

    #[test]
    fn wrap_rejects_non_finite() {
        assert_eq!(wrap_angle(f64::NAN), Err(Error::NonFinite("angle")));
        assert!(wrap_angle(f64::INFINITY).is_err());
    }

    #[test]
    fn grid_layout() {
        let g = AngleGrid::new(4).unwrap();
        let pts: Vec<f64> = g.points().collect();
        assert_eq!(pts[0], -PI);
        assert!((pts[2]).abs() < 1e-15);
        assert_eq!(g.nearest_index(0.0), 2);
        assert_eq!(g.nearest_index(PI - 1e-9), 0);
        assert!(AngleGrid::new(1).is_err());
    }

    #[test]
    fn nyquist_margin() {
        let g = AngleGrid::new(1024).unwrap();
        assert!(g.require_resolves(255).is_ok());
        assert!(matches!(
            g.require_resolves(256),
            Err(Error::GridTooCoarse { required: 1028, .. })
        ));
    }

    proptest! {
        #[test]
        fn wrap_is_idempotent_and_in_range(x in -1e6f64..1e6) {
            let w = wrap_angle(x).unwrap();
            prop_assert!((-PI..PI).contains(&w));
            prop_assert_eq!(wrap_angle(w).unwrap(), w);
            let turns = (x - w) / TAU;
            prop_assert!((turns - turns.round()).abs() < 1e-9);
        }
    }
}
