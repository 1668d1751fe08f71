//! # knotfold
//!
//! Planning and simulation for folding knots in midair with a team of robots
//! that carry a single cable.
//!
//! The pipeline runs in four stages:
//!
//! - [`knot`]: Gauss codes, grid diagrams, the opened corner polyline and
//!   topology extraction from sampled 3D curves.
//! - [`catenary`]: catenary root-finding, evaluation, arc length, piecewise
//!   composition and the sag bound that keeps crossings apart.
//! - [`representation`]: the multi-catenary knot plan (heights, segment
//!   lengths, rescaling, topology verification).
//! - [`trajectory`] and [`sim`]: the shared quintic trajectory, the delayed
//!   leader-follower schedule and a fixed-step double-integrator simulation.
//!
//! [`io`] holds the versioned file formats and the bundled knot assets.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catenary;
pub mod geometry;
pub mod io;
pub mod knot;
pub mod representation;
pub mod sim;
pub mod trajectory;

pub use geometry::Point3;
