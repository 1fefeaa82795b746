//! Concrete (pseudo)metric backends used by the application drivers.

mod assignment;
mod diagram;
pub mod grid;
pub mod polygon;

pub use diagram::{wasserstein1_distance, DiagramPoint, PersistenceDiagram, Wasserstein1Metric};
pub use grid::{l2_grid_distance, GridFunction, L2GridMetric};
pub use polygon::{hausdorff_distance, ConvexPolygon, HausdorffMetric};

pub(crate) use assignment::min_cost_assignment;
