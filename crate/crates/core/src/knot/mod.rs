//! Knot descriptions and their conversions: Gauss codes, grid diagrams, the
//! opened corner polyline, and Gauss-code extraction from sampled curves.

mod curve_code;
mod gauss;
mod grid;
mod polyline;
mod random;
mod search;

pub use curve_code::{curve_crossings, gauss_code_of_curve, CurveCrossing, CurveCrossings, Z_TIE};
pub use gauss::{canonicalize, parse_gauss_code, GaussCode, GaussEntry, Pass};
pub use grid::{
    open_diagram, validate_grid, GridDiagram, GridReport, GridViolation, OpenGridDiagram,
    SegmentKind,
};
pub use polyline::{planar_gauss_code, trace_polyline, KnotPolyline, PlanarCrossing};
pub use random::{random_grid, random_knot_grid};
pub use search::{grid_search, SearchOutcome, MAX_SEARCH_SIZE};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KnotError {
    #[error("malformed Gauss code token `{0}` (expected <label><+|->)")]
    MalformedToken(String),
    #[error("label {label} appears {count} times (expected 2)")]
    LabelCount { label: u32, count: usize },
    #[error("label {label} has the same pass at both occurrences")]
    SamePassTwice { label: u32 },
    #[error("invalid grid diagram: {0}")]
    InvalidGrid(GridReport),
    #[error("grid diagram has {components} components, not a single knot")]
    NotAKnot { components: usize },
    #[error("no corner with crossing-free incident segments; commute rows or columns first")]
    NoEligibleCorner,
    #[error("opened path is disconnected: {found} corners, expected {expected}")]
    Disconnected { found: usize, expected: usize },
    #[error("non-positive geometry parameter {name} = {value}")]
    BadParameter { name: &'static str, value: f64 },
    #[error("non-transversal intersection between segments {a} and {b}")]
    Tangential { a: usize, b: usize },
    #[error("degenerate crossing between segments {a} and {b}: {reason}")]
    DegenerateCrossing { a: usize, b: usize, reason: String },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}
