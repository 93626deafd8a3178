use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bin boundaries are snapped to integer sample coordinates at this
/// relative tolerance, so bin-aligned data survives float round trips.
pub(crate) const BIN_SNAP_EPS: f64 = 1e-9;

/// Uniform midpoint discretization of a time interval.
///
/// Sample `j` covers `[t_start + j*dt, t_start + (j+1)*dt)` and is
/// evaluated at its midpoint `t_start + (j + 0.5)*dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    n_samples: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_samples: usize) -> Result<Self> {
        if !t_start.is_finite() || !t_end.is_finite() {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if t_end <= t_start {
            return Err(Error::InvalidGrid(format!(
                "t_end ({t_end}) must exceed t_start ({t_start})"
            )));
        }
        if n_samples == 0 {
            return Err(Error::InvalidGrid("need at least one sample".into()));
        }
        Ok(Self {
            t_start,
            t_end,
            n_samples,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn len(&self) -> usize {
        self.n_samples
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn span(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn dt(&self) -> f64 {
        self.span() / self.n_samples as f64
    }

    pub fn midpoint(&self, j: usize) -> f64 {
        self.t_start + (j as f64 + 0.5) * self.dt()
    }

    /// Left edge of sample `j` (`j` may equal `len()` for the right bound).
    pub fn edge(&self, j: usize) -> f64 {
        self.t_start + j as f64 * self.dt()
    }

    /// Sample containing `t`. `t == t_end` maps to the last sample.
    pub fn bin_of(&self, t: f64) -> Result<usize> {
        if !t.is_finite() || t < self.t_start || t > self.t_end {
            return Err(Error::InvalidGrid(format!(
                "time {t} outside [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        let j = ((t - self.t_start) / self.dt()).floor() as usize;
        Ok(j.min(self.n_samples - 1))
    }

    /// Absolute time mapped to sample coordinates, snapped to the nearest
    /// integer when within `BIN_SNAP_EPS`.
    pub(crate) fn sample_coord(&self, t: f64) -> f64 {
        let b = (t - self.t_start) / self.dt();
        let r = b.round();
        if (b - r).abs() <= BIN_SNAP_EPS * (1.0 + b.abs()) {
            r
        } else {
            b
        }
    }

    /// Fraction of sample `j` covered by `[begin, end]`, in `[0, 1]`.
    pub(crate) fn coverage(&self, j: usize, begin: f64, end: f64) -> f64 {
        let lo = self.sample_coord(begin).max(j as f64);
        let hi = self.sample_coord(end).min(j as f64 + 1.0);
        (hi - lo).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_grids() {
        assert!(TimeGrid::new(0.0, 0.0, 4).is_err());
        assert!(TimeGrid::new(1.0, 0.0, 4).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0).is_err());
        assert!(TimeGrid::new(f64::NAN, 1.0, 1).is_err());
    }

    #[test]
    fn midpoints_and_edges() {
        let g = TimeGrid::new(0.0, 10.0, 10).unwrap();
        assert_eq!(g.dt(), 1.0);
        assert_eq!(g.midpoint(0), 0.5);
        assert_eq!(g.midpoint(9), 9.5);
        assert_eq!(g.edge(10), 10.0);
    }

    #[test]
    fn bin_of_clamps_right_bound() {
        let g = TimeGrid::new(0.0, 10.0, 10).unwrap();
        assert_eq!(g.bin_of(0.0).unwrap(), 0);
        assert_eq!(g.bin_of(2.0).unwrap(), 2);
        assert_eq!(g.bin_of(10.0).unwrap(), 9);
        assert!(g.bin_of(10.5).is_err());
        assert!(g.bin_of(-0.1).is_err());
    }

    #[test]
    fn coverage_handles_partial_bins() {
        let g = TimeGrid::new(0.0, 10.0, 10).unwrap();
        assert_eq!(g.coverage(2, 0.0, 10.0), 1.0);
        assert_eq!(g.coverage(2, 2.25, 2.75), 0.5);
        assert_eq!(g.coverage(2, 3.0, 4.0), 0.0);
        // snapped: a boundary recomputed through float noise still covers fully
        assert_eq!(g.coverage(2, 2.0 + 1e-13, 3.0 - 1e-13), 1.0);
    }
}
