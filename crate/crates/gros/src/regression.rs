//! Nadaraya-Watson kernel regression with robust aggregation: split the
//! sample into groups, fit one kernel estimate per group, then either
//! select one whole curve by depth under the discretized L2 metric, or
//! select independently at every grid node.

use rand::Rng;

use crate::aggregate::{partition_indices, AbsMetric, CandidatePool};
use crate::metrics::grid::L2GridMetric;
use crate::metrics::GridFunction;
use crate::{Error, Result};

/// Paired observations `(x_i, y_i)` on the design domain.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSample {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl RegressionSample {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        assert_eq!(xs.len(), ys.len());
        Self { xs, ys }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

/// Gaussian kernel with bandwidth `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub bandwidth: f64,
}

impl KernelSpec {
    pub fn new(bandwidth: f64) -> Self {
        assert!(bandwidth > 0.0);
        Self { bandwidth }
    }

    fn weight(&self, u: f64) -> f64 {
        let z = u / self.bandwidth;
        (-0.5 * z * z).exp() / (self.bandwidth * (2.0 * std::f64::consts::PI).sqrt())
    }
}

/// Denominators below this are treated as numerically empty neighborhoods
/// and fall back to the nearest observation.
const DENOMINATOR_FLOOR: f64 = 1e-300;

/// Nadaraya-Watson estimate on the nodes of `grid`. Far from the data,
/// where the kernel weights underflow, the value of the nearest `x` is
/// used.
pub fn nw_estimate(
    sample: &RegressionSample,
    spec: &KernelSpec,
    grid: &GridFunction,
) -> Result<GridFunction> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let values = grid
        .nodes()
        .map(|x| {
            let mut num = 0.0;
            let mut den = 0.0;
            for (&xi, &yi) in sample.xs.iter().zip(&sample.ys) {
                let w = spec.weight(xi - x);
                num += w * yi;
                den += w;
            }
            if den < DENOMINATOR_FLOOR {
                let (mut best, mut best_d) = (0, f64::INFINITY);
                for (i, &xi) in sample.xs.iter().enumerate() {
                    let d = (xi - x).abs();
                    if d < best_d {
                        best = i;
                        best_d = d;
                    }
                }
                sample.ys[best]
            } else {
                num / den
            }
        })
        .collect();
    Ok(GridFunction::new(grid.grid_start, grid.grid_step, values))
}

/// Output of [`ranw_fit`]: the whole-curve selection, the node-wise
/// selection, and the per-group candidate curves.
#[derive(Debug, Clone)]
pub struct RanwFit {
    pub global: GridFunction,
    pub pointwise: GridFunction,
    pub candidates: Vec<GridFunction>,
}

/// Fits one kernel estimate per random group and aggregates twice: `global`
/// selects the candidate curve of minimal depth under the discretized L2
/// metric; `pointwise` selects, independently at every grid node, among
/// the candidate values under the absolute-value metric (the finest
/// piecewise combination of the candidates, one piece per node).
pub fn ranw_fit<R: Rng>(
    sample: &RegressionSample,
    k_groups: usize,
    spec: &KernelSpec,
    grid: &GridFunction,
    rng: &mut R,
) -> Result<RanwFit> {
    let mut groups = partition_indices(sample.len(), k_groups, rng)?;
    for g in &mut groups {
        // Fix the accumulation order so the fit only depends on the group
        // memberships, not on the shuffle that produced them.
        g.sort_unstable();
    }
    let candidates: Vec<GridFunction> = groups
        .iter()
        .map(|g| {
            let sub = RegressionSample::new(
                g.iter().map(|&i| sample.xs[i]).collect(),
                g.iter().map(|&i| sample.ys[i]).collect(),
            );
            nw_estimate(&sub, spec, grid)
        })
        .collect::<Result<_>>()?;

    let pool = CandidatePool::new(&candidates, L2GridMetric)?;
    let global = candidates[pool.select_index().selected_index].clone();

    let mut pointwise = Vec::with_capacity(grid.len());
    let mut node_values = vec![0.0f64; candidates.len()];
    for node in 0..grid.len() {
        for (j, c) in candidates.iter().enumerate() {
            node_values[j] = c.values[node];
        }
        let node_pool = CandidatePool::new(&node_values, AbsMetric)?;
        pointwise.push(node_values[node_pool.select_index().selected_index]);
    }

    Ok(RanwFit {
        global,
        pointwise: GridFunction::new(grid.grid_start, grid.grid_step, pointwise),
        candidates,
    })
}

/// Bandwidth rule `h = c' (K/n)^(1/(d+2))`.
pub fn bandwidth_rule(n: usize, k_groups: usize, dimension: usize, c_prime: f64) -> f64 {
    assert!(n > 0 && k_groups >= 1 && dimension >= 1 && c_prime > 0.0);
    c_prime * (k_groups as f64 / n as f64).powf(1.0 / (dimension as f64 + 2.0))
}
