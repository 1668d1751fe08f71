//! Multi-catenary knot plans: sag assignment from crossing roles, curve
//! assembly, cable lengths, rescaling to a given cable, and sampled topology
//! verification.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catenary::{
    compose, crossing_clearances, h_max_bound, make_segment, CatenaryError, MultiCatenaryCurve,
};
use crate::knot::{
    curve_crossings, open_diagram, planar_gauss_code, trace_polyline, GaussCode, GridDiagram, KnotError,
    KnotPolyline,
};
use crate::Point3;

/// Samples per segment used by [`verify_topology`] unless overridden.
pub const DEFAULT_SAMPLES: usize = 128;
/// Fewest samples per segment accepted by [`verify_topology`].
pub const MIN_SAMPLES: usize = 32;
/// Default plane height as a multiple of `h_max`. Leaves room for the
/// deepest trajectory dip (1.5·h_max) and for the cable hanging below the
/// robots while they fold, so it stays off the floor.
pub const DEFAULT_ZP_FACTOR: f64 = 2.5;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Knot(#[from] KnotError),
    #[error(transparent)]
    Catenary(#[from] CatenaryError),
    #[error("z_p = {z_p} must exceed h_max = {h_max}, otherwise the cables would touch the floor")]
    FloorContact { z_p: f64, h_max: f64 },
    #[error("crossing {index} has non-positive clearance {clearance}")]
    ClearanceViolated { index: usize, clearance: f64 },
    #[error("cable length must be positive and finite, got {0}")]
    BadCableLength(f64),
    #[error("no grid scale reproduces cable length {target}")]
    RescaleFailed { target: f64 },
    #[error("need at least {MIN_SAMPLES} samples per segment, got {0}")]
    TooFewSamples(usize),
}

/// A fully specified multi-catenary representation of an opened knot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotPlan {
    pub polyline: KnotPolyline,
    /// Gauss code of the polyline closed through its anchor.
    pub target: GaussCode,
    /// Sag of each segment, either `h_min` or `h_max`.
    pub heights: Vec<f64>,
    pub curve: MultiCatenaryCurve,
    /// Cable length of each segment.
    pub lengths: Vec<f64>,
    pub total_length: f64,
    pub cell_width: f64,
    pub plane_height: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Over-curve height minus under-curve height at each crossing.
    pub clearances: Vec<f64>,
}

impl KnotPlan {
    pub fn n_robots(&self) -> usize {
        self.polyline.n_points()
    }

    /// Target positions `p_1*..p_n*`.
    pub fn targets(&self) -> &[Point3] {
        &self.polyline.points
    }

    pub fn min_clearance(&self) -> Option<f64> {
        self.clearances.iter().copied().reduce(f64::min)
    }
}

/// `h_max` for segments that appear under some crossing, `h_min` otherwise.
pub fn assign_heights(poly: &KnotPolyline, h_min: f64, h_max: f64) -> Vec<f64> {
    let mut heights = vec![h_min; poly.n_segments()];
    for c in &poly.crossings {
        heights[c.under] = h_max;
    }
    heights
}

fn check_positive(name: &'static str, value: f64) -> Result<(), PlanError> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(KnotError::BadParameter { name, value }.into());
    }
    Ok(())
}

/// Builds the plan for `poly` with its points lifted to height `z_p`.
pub fn build_plan(poly: &KnotPolyline, h_min: f64, z_p: f64, tol: f64) -> Result<KnotPlan, PlanError> {
    check_positive("h_min", h_min)?;
    check_positive("z_p", z_p)?;
    let d = poly.cell_width;
    let h_max = h_max_bound(h_min, poly.grid_size, d, tol)?;
    if z_p <= h_max {
        return Err(PlanError::FloorContact { z_p, h_max });
    }
    let mut poly = poly.clone();
    for p in poly.points.iter_mut() {
        p.z = z_p;
    }
    poly.closing_anchor.z = z_p;
    poly.plane_height = z_p;

    let heights = assign_heights(&poly, h_min, h_max);
    let segments = (0..poly.n_segments())
        .map(|k| {
            let (a, b) = poly.segment(k);
            make_segment(a, b, heights[k], tol).map(|mut seg| {
                seg.endpoints = (k, k + 1);
                seg
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let curve = compose(segments)?;
    let lengths: Vec<f64> = curve.segments.iter().map(|s| s.length()).collect();
    let total_length = lengths.iter().sum();
    let clearances = crossing_clearances(&curve, &poly.crossings)?;
    if let Some((index, &clearance)) = clearances.iter().enumerate().find(|(_, c)| !(**c > 0.0)) {
        return Err(PlanError::ClearanceViolated { index, clearance });
    }
    let target = planar_gauss_code(&poly)?;
    Ok(KnotPlan {
        polyline: poly,
        target,
        heights,
        curve,
        lengths,
        total_length,
        cell_width: d,
        plane_height: z_p,
        h_min,
        h_max,
        clearances,
    })
}

/// Geometry inputs for planning from a grid diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanParams {
    pub d: f64,
    pub h_min: f64,
    /// Plane height; `None` selects `DEFAULT_ZP_FACTOR · h_max`.
    pub z_p: Option<f64>,
    pub tol: f64,
}

impl PlanParams {
    pub fn new(d: f64, h_min: f64) -> Self {
        PlanParams { d, h_min, z_p: None, tol: crate::catenary::DEFAULT_TOL }
    }
}

/// Opens, traces and plans a grid diagram.
pub fn plan_grid(grid: &GridDiagram, params: &PlanParams) -> Result<KnotPlan, PlanError> {
    check_positive("d", params.d)?;
    check_positive("h_min", params.h_min)?;
    let og = open_diagram(grid)?;
    let z_p = match params.z_p {
        Some(z) => z,
        None => DEFAULT_ZP_FACTOR * h_max_bound(params.h_min, grid.n, params.d, params.tol)?,
    };
    let poly = trace_polyline(&og, params.d, z_p)?;
    build_plan(&poly, params.h_min, z_p, params.tol)
}

/// Total cable length and the per-segment lengths, in path order.
pub fn cable_cut_list(plan: &KnotPlan) -> (f64, Vec<f64>) {
    (plan.total_length, plan.lengths.clone())
}

/// Human-readable cut list: attachment offsets along the straight cable.
pub fn format_cut_list(plan: &KnotPlan) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "total cable length: {:.6}", plan.total_length);
    let _ = writeln!(out, "robots: {}", plan.n_robots());
    let _ = writeln!(out, "{:>4} {:>12} {:>10} {:>14}", "seg", "length", "sag", "attach_offset");
    let mut offset = 0.0;
    for (k, (&len, &h)) in plan.lengths.iter().zip(&plan.heights).enumerate() {
        let _ = writeln!(out, "{:>4} {:>12.6} {:>10.6} {:>14.6}", k + 1, len, h, offset);
        offset += len;
    }
    let _ = writeln!(out, "{:>4} {:>12} {:>10} {:>14.6}", "end", "", "", offset);
    out
}

/// Result of fitting a plan to a given cable.
#[derive(Debug, Clone)]
pub struct Rescaled {
    /// Factor applied to `d`, `h_min` and `z_p`.
    pub scale: f64,
    pub params: PlanParams,
    pub plan: KnotPlan,
}

/// Finds the grid scale whose plan uses a cable of length within
/// `[ℓ_given·(1 - 1e-6), ℓ_given]`. `d`, `h_min` and `z_p` scale together, so
/// the total length is proportional to the scale; bisection on the scale
/// absorbs rounding.
pub fn rescale_for_cable(grid: &GridDiagram, params: &PlanParams, length: f64) -> Result<Rescaled, PlanError> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(PlanError::BadCableLength(length));
    }
    let base_zp = match params.z_p {
        Some(z) => z,
        None => DEFAULT_ZP_FACTOR * h_max_bound(params.h_min, grid.n, params.d, params.tol)?,
    };
    let scaled = |k: f64| PlanParams { d: params.d * k, h_min: params.h_min * k, z_p: Some(base_zp * k), tol: params.tol };
    let base = plan_grid(grid, &scaled(1.0))?;
    let lo_len = length * (1.0 - 1e-6);
    let accept = |plan: &KnotPlan| plan.total_length >= lo_len && plan.total_length <= length;

    // aim for the middle of the accepted band
    let guess = length / base.total_length * (1.0 - 5e-7);
    let mut lo = guess * (1.0 - 1e-3);
    let mut hi = guess * (1.0 + 1e-3);
    let mut k = guess;
    for _ in 0..200 {
        let plan = plan_grid(grid, &scaled(k))?;
        if accept(&plan) {
            return Ok(Rescaled { scale: k, params: scaled(k), plan });
        }
        if plan.total_length > length {
            hi = k;
        } else {
            lo = k;
        }
        k = 0.5 * (lo + hi);
    }
    Err(PlanError::RescaleFailed { target: length })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Match,
    Mismatch,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub verdict: Verdict,
    pub target: GaussCode,
    pub extracted: Option<GaussCode>,
    pub samples_per_segment: usize,
    /// Height gap at each detected crossing of the sampled curve.
    pub crossing_gaps: Vec<f64>,
    pub min_abs_gap: Option<f64>,
    pub note: Option<String>,
}

impl TopologyReport {
    pub fn is_match(&self) -> bool {
        self.verdict == Verdict::Match
    }
}

/// Samples every segment at cell centres; closes through `anchor` if given.
pub fn sample_curve(curve: &MultiCatenaryCurve, per_segment: usize, anchor: Option<Point3>) -> Vec<Point3> {
    let chunks: Vec<Vec<Point3>> = curve
        .segments
        .par_iter()
        .map(|seg| {
            let s = seg.params.half_span;
            (0..per_segment)
                .map(|j| seg.eval(-s + (j as f64 + 0.5) * 2.0 * s / per_segment as f64))
                .chain(std::iter::once(seg.end()))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(curve.segments.len() * (per_segment + 1) + 2);
    out.push(curve.segments[0].start());
    for c in chunks {
        out.extend(c);
    }
    out.extend(anchor);
    out
}

/// Compares the Gauss code of a closed sampled point sequence with `target`.
/// Degenerate crossings make the verdict inconclusive.
pub fn verify_samples(samples: &[Point3], target: &GaussCode, per_segment: usize) -> TopologyReport {
    match curve_crossings(samples, true) {
        Ok(found) => {
            let verdict = if found.code.equivalent(target) { Verdict::Match } else { Verdict::Mismatch };
            TopologyReport {
                verdict,
                target: target.clone(),
                min_abs_gap: found.min_dz(),
                crossing_gaps: found.crossings.iter().map(|c| c.dz).collect(),
                extracted: Some(found.code),
                samples_per_segment: per_segment,
                note: None,
            }
        }
        Err(e) => TopologyReport {
            verdict: Verdict::Inconclusive,
            target: target.clone(),
            extracted: None,
            samples_per_segment: per_segment,
            crossing_gaps: Vec::new(),
            min_abs_gap: None,
            note: Some(format!("{e}; try more samples per segment")),
        },
    }
}

/// Samples the curve (closed through `anchor`), extracts its Gauss code and
/// compares it with `target`. An inconclusive first pass is retried once at
/// twice the density.
pub fn verify_topology(
    curve: &MultiCatenaryCurve,
    target: &GaussCode,
    anchor: Option<Point3>,
    samples_per_segment: usize,
) -> Result<TopologyReport, PlanError> {
    if samples_per_segment < MIN_SAMPLES {
        return Err(PlanError::TooFewSamples(samples_per_segment));
    }
    let mut k = samples_per_segment;
    let mut report = verify_samples(&sample_curve(curve, k, anchor), target, k);
    if report.verdict == Verdict::Inconclusive {
        k *= 2;
        report = verify_samples(&sample_curve(curve, k, anchor), target, k);
    }
    Ok(report)
}

/// [`verify_topology`] of a plan against its own target code.
pub fn verify_plan(plan: &KnotPlan, samples_per_segment: usize) -> Result<TopologyReport, PlanError> {
    verify_topology(&plan.curve, &plan.target, Some(plan.polyline.closing_anchor), samples_per_segment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catenary::{arc_length, solve_intrinsic};
    use crate::knot::parse_gauss_code;

    fn unknot() -> GridDiagram {
        GridDiagram::new(vec![vec![1, -1], vec![-1, 1]])
    }

    fn curl() -> GridDiagram {
        GridDiagram::new(vec![vec![0, -1, 1], vec![1, 0, -1], vec![-1, 1, 0]])
    }

    #[test]
    fn unknot_plan_structure() {
        let plan = plan_grid(&unknot(), &PlanParams::new(1.0, 0.5)).unwrap();
        assert_eq!(plan.n_robots(), 3);
        assert_eq!(plan.lengths.len(), 2);
        assert!(plan.heights.iter().all(|&h| h == 0.5));
        assert!(plan.target.is_empty());
        // each segment spans one cell; independent bisection for a
        let f = |a: f64| 0.5 / a - ((0.5 / a).cosh() - 1.0);
        let (mut lo, mut hi) = (1e-3_f64, 1e3_f64);
        for _ in 0..300 {
            let mid = (lo * hi).sqrt();
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a = (lo * hi).sqrt();
        let len = 2.0 * a * (0.5 / a).sinh();
        assert!((plan.lengths[0] - len).abs() < 1e-9 * len);
        assert_eq!(plan.total_length, plan.lengths[0] + plan.lengths[1]);
    }

    #[test]
    fn heights_follow_crossing_roles() {
        let og = open_diagram(&curl()).unwrap();
        let poly = trace_polyline(&og, 1.0, 10.0).unwrap();
        let h = assign_heights(&poly, 1.0, 2.0);
        let under = poly.crossings[0].under;
        for (k, &hk) in h.iter().enumerate() {
            assert_eq!(hk, if k == under { 2.0 } else { 1.0 });
        }
        let mut doubled = poly.clone();
        doubled.crossings.push(poly.crossings[0]);
        assert_eq!(assign_heights(&doubled, 1.0, 2.0), h);
        let mut bare = poly;
        bare.crossings.clear();
        assert!(assign_heights(&bare, 1.0, 2.0).iter().all(|&x| x == 1.0));
    }

    #[test]
    fn low_plane_rejected() {
        let og = open_diagram(&curl()).unwrap();
        let poly = trace_polyline(&og, 1.0, 1.0).unwrap();
        let h_max = h_max_bound(1.0, 3, 1.0, 1e-12).unwrap();
        assert!(matches!(build_plan(&poly, 1.0, 0.5 * h_max, 1e-12), Err(PlanError::FloorContact { .. })));
        assert!(build_plan(&poly, 1.0, 1.01 * h_max, 1e-12).is_ok());
    }

    #[test]
    fn curl_plan_clears_and_verifies() {
        let plan = plan_grid(&curl(), &PlanParams::new(1.0, 1.0)).unwrap();
        assert_eq!(plan.clearances.len(), 1);
        assert!(plan.clearances[0] > 0.0);
        assert_eq!(plan.plane_height, DEFAULT_ZP_FACTOR * plan.h_max);
        assert!(plan.curve.lowest_point() > 0.0);
        let report = verify_plan(&plan, DEFAULT_SAMPLES).unwrap();
        assert!(report.is_match(), "{report:?}");
        assert_eq!(report.extracted.as_ref().unwrap().crossing_count(), 1);
    }

    #[test]
    fn verify_against_wrong_code() {
        let plan = plan_grid(&curl(), &PlanParams::new(1.0, 1.0)).unwrap();
        let eight = parse_gauss_code("1- 2+ 3- 4+ 2- 1+ 4- 3+").unwrap();
        let report = verify_topology(&plan.curve, &eight, Some(plan.polyline.closing_anchor), 64).unwrap();
        assert_eq!(report.verdict, Verdict::Mismatch);
        assert!(matches!(verify_plan(&plan, 8), Err(PlanError::TooFewSamples(8))));
    }

    #[test]
    fn lengths_obey_sag_identity() {
        let plan = plan_grid(&curl(), &PlanParams::new(1.5, 0.7)).unwrap();
        for (seg, &len) in plan.curve.segments.iter().zip(&plan.lengths) {
            let (h, a) = (seg.params.sag, seg.params.shape);
            let lhs = (0.5 * len).powi(2);
            assert!((lhs - (h * h + 2.0 * a * h)).abs() <= 1e-9 * lhs);
            let a2 = solve_intrinsic(h, seg.params.half_span, 1e-12).unwrap();
            assert_eq!(arc_length(a2, seg.params.half_span), len);
        }
        let (total, parts) = cable_cut_list(&plan);
        assert_eq!(total, parts.iter().sum::<f64>());
    }

    #[test]
    fn scale_covariance() {
        let a = plan_grid(&curl(), &PlanParams { z_p: Some(5.0), ..PlanParams::new(1.0, 1.0) }).unwrap();
        let b = plan_grid(&curl(), &PlanParams { z_p: Some(10.0), ..PlanParams::new(2.0, 2.0) }).unwrap();
        assert!((b.total_length - 2.0 * a.total_length).abs() < 1e-9 * b.total_length);
    }

    #[test]
    fn rescale_hits_length() {
        let params = PlanParams::new(1.0, 1.0);
        let base = plan_grid(&curl(), &params).unwrap();
        let target = 1.7 * base.total_length;
        let r = rescale_for_cable(&curl(), &params, target).unwrap();
        assert!(r.plan.total_length <= target && r.plan.total_length >= target * (1.0 - 1e-6));
        assert!((r.scale - 1.7).abs() < 1e-5);
        assert!(matches!(rescale_for_cable(&curl(), &params, 0.0), Err(PlanError::BadCableLength(_))));
    }

    #[test]
    fn cut_list_text() {
        let plan = plan_grid(&unknot(), &PlanParams::new(1.0, 0.5)).unwrap();
        let text = format_cut_list(&plan);
        assert!(text.starts_with("total cable length:"));
        assert_eq!(text.lines().count(), 6);
    }
}
