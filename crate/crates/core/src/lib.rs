//! Measures of non-convexity for planar sets.
//!
//! Four measures are provided: `D` (largest empty disk relative to the
//! diameter), `M` (relative area gap to the convex hull), `W` (probability
//! that the midpoint of two uniform points falls outside) and `L`
//! (expected missing fraction of a random triangle). Each comes with exact
//! or Monte Carlo population values and with sample-based estimators.

pub mod error;
pub mod estimators;
pub mod experiments;
pub mod geometry;
pub mod report;
pub mod rng;
pub mod sets;

pub use error::{Error, Result};
pub use estimators::{estimate, ConfidenceInterval, Diagnostics, EstimatorConfig, MeasureEstimate, MeasureKind};
pub use experiments::{ExperimentSpec, ExperimentTable, Target};
pub use geometry::Point;
pub use sets::{AnalyticSet, Family, FamilyParam, FamilySet, MaskSet, PointCloud};
