//! Optimal path planning on 2-D surfaces embedded in `R^n`.
//!
//! The surface `s(x1, x2) = (x1, x2, f_3(x1, x2), ..., f_n(x1, x2))` is
//! replaced by its projection plane carrying the pullback metric `h`, under
//! which planar curve lengths equal the ambient lengths of their lifts.
//! Planning then happens in two dimensions:
//!
//! * [`fields`]: smooth extra coordinates (height, ground resistance, ...).
//! * [`metric`]: `h`, its inverse, lifts, pushforwards, curve length and
//!   Christoffel symbols.
//! * [`geodesic`]: RK4 geodesic shooting, used as the optimality reference.
//! * [`planner`]: RRT*-R and the Euclidean-lifted RRT* baseline.
//! * [`harness`]: scenarios, experiment protocols and file outputs.

pub mod error;
pub mod fields;
pub mod geodesic;
pub mod harness;
pub mod metric;
pub mod planner;

pub use error::{Error, Result};
pub use fields::{GaussianBump, ScalarField2D, SmoothField};
pub use geodesic::{FanSpec, GeodesicOptions, GeodesicState, GeodesicTrace, Termination};
pub use metric::{Bounds, ChristoffelSymbols, LiftedPoint, ManifoldModel, MetricTensor2, PlanarPoint};
pub use planner::{CostBackend, ObstacleRegion, PlanOutcome, PlanTree, PlannerConfig};
