//! Robust orientation of directional sensors under location uncertainty.
//!
//! The crate computes, for every sensor of a planar deployment, the largest
//! location-uncertainty radius under which its Voronoi cell constraints stay
//! feasible (the radius of robust feasibility), and uses it in a
//! Voronoi-vertex greedy orientation algorithm that maximizes the area each
//! sensor's field of view covers inside its own cell.
//!
//! Modules, bottom up:
//!
//! - [`geometry`]: exact areas of polygon / disk / sector intersections and a
//!   Monte-Carlo area oracle.
//! - [`voronoi`]: bounded Voronoi diagrams by half-plane intersection.
//! - [`rrf`]: radius of robust feasibility and evaluated sensor positions.
//! - [`sensing`]: directional coverage predicate and per-vertex coverage.
//! - [`optimizer`]: perimeter filter, localized orientation, collaborative
//!   adjustment.
//! - [`harness`]: deployments, strategies, metrics, sweeps, SVG output.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod error;
pub mod geometry;
pub mod harness;
pub mod optimizer;
pub mod rrf;
pub mod sensing;
pub mod voronoi;

pub use error::{Error, Result};
pub use geometry::{ConvexPolygon, Point2, Sector, Vector2};
pub use voronoi::{Deployment, Region, VoronoiDiagram};
pub use rrf::{PositionMode, RobustFeasibilityResult, RrfBounds};
pub use sensing::{SensorConfig, SensorState};
