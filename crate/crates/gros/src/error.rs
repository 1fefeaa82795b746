use thiserror::Error;

/// Errors shared across the aggregation engine, the metric backends and the
/// application drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("delta must lie in (0, 1), got {0}")]
    InvalidDelta(f64),

    #[error("cannot split {n} indices into {k} groups")]
    InvalidPartition { n: usize, k: usize },

    #[error("q must lie in [1/2, 1], got {0}")]
    InvalidQ(f64),

    #[error("candidate pool must not be empty")]
    EmptyPool,

    #[error("search pool must not be empty")]
    EmptySearchPool,

    #[error("Hoeffding tail bound needs K*p <= floor(K/2), got K = {k}, p = {p}")]
    BoundNotApplicable { k: usize, p: f64 },

    #[error("grids are incompatible (start {0} vs {1}, step {2} vs {3}, len {4} vs {5})")]
    IncompatibleGrids(f64, f64, f64, f64, usize, usize),

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("persistence diagrams carry mismatched essential classes")]
    MismatchedEssentials,

    #[error("point set of size {n} exceeds the Rips cap of {cap}")]
    RipsCapExceeded { n: usize, cap: usize },

    #[error("skew-t centering requires nu > 1, got {0}")]
    InvalidDegreesOfFreedom(f64),

    #[error("ring radii must satisfy 0 <= r < R, got r = {r}, R = {outer}")]
    InvalidRing { r: f64, outer: f64 },

    #[error("cannot fit {k} clusters to {n} points")]
    TooManyClusters { k: usize, n: usize },

    #[error("label permutation matching supports k <= 6, got {0}")]
    TooManyLabels(usize),

    #[error("bandit policy queried before the warm-up completed")]
    WarmupIncomplete,

    #[error("empty sample")]
    EmptySample,
}
