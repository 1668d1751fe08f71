//! Catenary mathematics: root-finding for the shape constant, evaluation,
//! arc length, piecewise composition, and the sag bound for crossings.

mod bound;
mod curve;
mod solve;

pub use bound::{h_max_bound, worst_case_geometry, worst_case_rise, MARGIN_FRACTION};
pub use curve::{
    clearance_between, compose, crossing_clearances, eval_curve, make_segment, CatenaryParams,
    CatenarySegment, MultiCatenaryCurve, CONTINUITY_TOL,
};
pub use solve::{arc_length, cosh_m1, eval_local, solve_from_length, solve_intrinsic, MAX_ARGUMENT};

use thiserror::Error;

/// Default solver tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CatenaryError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} is not finite ({value})")]
    NonFinite { name: &'static str, value: f64 },
    #[error("tolerance {0} outside (0, 1e-6]")]
    BadTolerance(f64),
    #[error("degenerate catenary: {0}")]
    Degenerate(&'static str),
    #[error("cable of length {length} cannot span {span} (taut or overstretched)")]
    Taut { length: f64, span: f64 },
    #[error("root residual {residual:e} above tolerance")]
    NoConvergence { residual: f64 },
    #[error("segment endpoints coincide")]
    CoincidentEndpoints,
    #[error("segment endpoints at different heights ({z0} vs {z1})")]
    UnequalHeights { z0: f64, z1: f64 },
    #[error("endpoint reconstruction error {error:e}")]
    Reconstruction { error: f64 },
    #[error("curve needs at least one segment")]
    EmptyCurve,
    #[error("segments {} and {index} are {gap:e} apart", index - 1)]
    Discontinuous { index: usize, gap: f64 },
    #[error("curve parameter {t} outside [0, {max}]")]
    OutOfRange { t: f64, max: f64 },
    #[error("segment index {0} out of range")]
    BadIndex(usize),
    #[error("crossing segments lie in parallel planes")]
    ParallelPlanes,
    #[error("grid size {0} too small for a crossing bound")]
    GridTooSmall(usize),
    #[error("h_max fixed-point iteration failed to converge (last iterate {last})")]
    BoundDiverged { last: f64 },
}
