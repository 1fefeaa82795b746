//! Real functions sampled on a uniform 1-D grid and the discretized L2
//! metric between them.

use crate::aggregate::Metric;
use crate::{Error, Result};

/// A real function sampled on a uniform grid `start, start + step, ...`.
///
/// Two grid functions are metric-compatible iff start, step and length all
/// agree exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid_start: f64,
    pub grid_step: f64,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid_start: f64, grid_step: f64, values: Vec<f64>) -> Self {
        assert!(grid_step > 0.0, "grid step must be positive");
        assert!(values.len() >= 2, "grid needs at least two nodes");
        Self {
            grid_start,
            grid_step,
            values,
        }
    }

    /// Uniform grid of `n` nodes spanning `[a, b]` inclusive, values zeroed.
    pub fn zeros(a: f64, b: f64, n: usize) -> Self {
        Self::new(a, (b - a) / (n - 1) as f64, vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Grid node positions.
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let (start, step) = (self.grid_start, self.grid_step);
        (0..self.values.len()).map(move |i| start + i as f64 * step)
    }

    pub fn compatible_with(&self, other: &GridFunction) -> bool {
        self.grid_start == other.grid_start
            && self.grid_step == other.grid_step
            && self.values.len() == other.values.len()
    }
}

/// Discretized `L2(uniform)` distance: the square root of the trapezoidal
/// integral of `(f - g)^2` over the grid, normalized by the grid span.
pub fn l2_grid_distance(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    if !f.compatible_with(g) {
        return Err(Error::IncompatibleGrids(
            f.grid_start,
            g.grid_start,
            f.grid_step,
            g.grid_step,
            f.values.len(),
            g.values.len(),
        ));
    }
    let sq = |i: usize| {
        let d = f.values[i] - g.values[i];
        d * d
    };
    let n = f.values.len();
    let mut integral = 0.0;
    for i in 0..n - 1 {
        integral += 0.5 * f.grid_step * (sq(i) + sq(i + 1));
    }
    let span = f.grid_step * (n - 1) as f64;
    Ok((integral / span).sqrt())
}

/// [`Metric`] adapter for grid functions. Panics on incompatible grids, so
/// it is only handed pools built on a single shared grid.
#[derive(Debug, Clone, Copy, Default)]
pub struct L2GridMetric;

impl Metric<GridFunction> for L2GridMetric {
    fn distance(&self, a: &GridFunction, b: &GridFunction) -> f64 {
        l2_grid_distance(a, b).expect("pool grids must be compatible")
    }
}
