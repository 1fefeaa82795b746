//! Robust aggregation of group estimators in general (pseudo)metric spaces.
//!
//! The strategy: split a sample into `K` disjoint groups, fit one estimator
//! per group, then select or aggregate the `K` candidates by minimizing a
//! nearest-neighbor depth functional. The selected estimator inherits
//! sub-Gaussian deviation bounds from the group estimators and tolerates
//! corruption of up to roughly half of the groups.
//!
//! The crate is organized as:
//!
//! * [`aggregate`] — the selection engine: depth, pool minimization,
//!   practical index selection, group partitioning, concentration helpers.
//! * [`metrics`] — concrete metric backends: Euclidean, discretized L2 on
//!   grids, Hausdorff between convex polygons, 1-Wasserstein between
//!   persistence diagrams.
//! * [`samplers`] — the random generators driving the simulation studies,
//!   all seeded through an explicit splittable [`samplers::RandomState`].
//! * [`clustering`], [`bandits`], [`regression`], [`sets`], [`topology`] —
//!   the five application drivers.
//! * [`exec`] — the replicate-level parallel map (rayon when the `parallel`
//!   feature is on, sequential otherwise).

pub mod aggregate;
pub mod bandits;
pub mod clustering;
mod error;
pub mod exec;
pub mod metrics;
pub mod regression;
pub mod samplers;
pub mod sets;
pub mod topology;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
