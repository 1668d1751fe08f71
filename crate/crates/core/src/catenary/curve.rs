use serde::{Deserialize, Serialize};

use super::solve::{arc_length, cosh_m1, solve_intrinsic};
use super::CatenaryError;
use crate::knot::PlanarCrossing;
use crate::Point3;

/// Endpoint mismatch accepted between consecutive segments.
pub const CONTINUITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatenaryParams {
    /// Half the distance between the suspension points.
    pub half_span: f64,
    /// Drop from the suspension height to the lowest point.
    pub sag: f64,
    /// Shape constant `a`.
    pub shape: f64,
}

/// A catenary hanging between two points at equal height.
///
/// `heading` is the planar angle of the chord from the first to the second
/// endpoint, so a chord along +y has heading π/2. The curve is
/// `lowest + r·(cos θ, sin θ, 0) + a(cosh(r/a) - 1)·ẑ` for `r ∈ [-s, s]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatenarySegment {
    pub params: CatenaryParams,
    pub lowest: Point3,
    pub heading: f64,
    /// Indices of the two robots/points holding this segment.
    pub endpoints: (usize, usize),
}

impl CatenarySegment {
    pub fn direction(&self) -> Point3 {
        Point3::new(self.heading.cos(), self.heading.sin(), 0.0)
    }

    pub fn eval(&self, r: f64) -> Point3 {
        let a = self.params.shape;
        self.lowest + self.direction() * r + Point3::new(0.0, 0.0, a * cosh_m1(r / a))
    }

    pub fn start(&self) -> Point3 {
        self.eval(-self.params.half_span)
    }

    pub fn end(&self) -> Point3 {
        self.eval(self.params.half_span)
    }

    pub fn length(&self) -> f64 {
        arc_length(self.params.shape, self.params.half_span)
    }

    /// Suspension height (both endpoints).
    pub fn top(&self) -> f64 {
        self.lowest.z + self.params.sag
    }

    /// Signed curve parameter of the point of this segment's vertical plane
    /// above planar position `(x, y)`, measured from the lowest point.
    pub fn parameter_at(&self, x: f64, y: f64) -> f64 {
        let dir = self.direction();
        (x - self.lowest.x) * dir.x + (y - self.lowest.y) * dir.y
    }

    /// Height of the curve above planar position `(x, y)` on its plane.
    pub fn height_at(&self, x: f64, y: f64) -> f64 {
        let a = self.params.shape;
        self.lowest.z + a * cosh_m1(self.parameter_at(x, y) / a)
    }
}

/// Catenary between `p_i` and `p_next` (equal heights) with sag `h`.
pub fn make_segment(p_i: Point3, p_next: Point3, h: f64, tol: f64) -> Result<CatenarySegment, CatenaryError> {
    let chord = p_next - p_i;
    let span = chord.norm();
    if !(span > 0.0) {
        return Err(CatenaryError::CoincidentEndpoints);
    }
    if (p_i.z - p_next.z).abs() > 1e-12 * (1.0 + p_i.z.abs()) {
        return Err(CatenaryError::UnequalHeights { z0: p_i.z, z1: p_next.z });
    }
    let s = 0.5 * span;
    let a = solve_intrinsic(h, s, tol)?;
    let mid = (p_i + p_next) * 0.5;
    let seg = CatenarySegment {
        params: CatenaryParams { half_span: s, sag: h, shape: a },
        lowest: mid - Point3::new(0.0, 0.0, h),
        heading: chord.y.atan2(chord.x),
        endpoints: (0, 1),
    };
    let err = (seg.start() - p_i).norm().max((seg.end() - p_next).norm());
    if err > 1e-9 * s.max(1.0) {
        return Err(CatenaryError::Reconstruction { error: err });
    }
    Ok(seg)
}

/// Continuous chain of catenary segments parametrized by cumulative span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiCatenaryCurve {
    pub segments: Vec<CatenarySegment>,
    /// `q[k]` is the curve parameter where segment `k` starts; the last entry
    /// is the total parameter length.
    pub breakpoints: Vec<f64>,
}

/// Chains segments whose consecutive endpoints coincide.
pub fn compose(segments: Vec<CatenarySegment>) -> Result<MultiCatenaryCurve, CatenaryError> {
    if segments.is_empty() {
        return Err(CatenaryError::EmptyCurve);
    }
    for (k, w) in segments.windows(2).enumerate() {
        let gap = (w[0].end() - w[1].start()).norm();
        if gap > CONTINUITY_TOL {
            return Err(CatenaryError::Discontinuous { index: k + 1, gap });
        }
    }
    let mut breakpoints = Vec::with_capacity(segments.len() + 1);
    let mut q = 0.0;
    breakpoints.push(q);
    for seg in &segments {
        q += 2.0 * seg.params.half_span;
        breakpoints.push(q);
    }
    Ok(MultiCatenaryCurve { segments, breakpoints })
}

impl MultiCatenaryCurve {
    pub fn total_parameter(&self) -> f64 {
        *self.breakpoints.last().expect("breakpoints")
    }

    /// Point at curve parameter `t ∈ [0, q_n]`. A breakpoint belongs to the
    /// segment that ends there.
    pub fn eval(&self, t: f64) -> Result<Point3, CatenaryError> {
        let total = self.total_parameter();
        if !(t >= 0.0 && t <= total) {
            return Err(CatenaryError::OutOfRange { t, max: total });
        }
        // first breakpoint >= t, minus one
        let k = self.breakpoints[1..].partition_point(|&q| q < t).min(self.segments.len() - 1);
        let seg = &self.segments[k];
        Ok(seg.eval(t - self.breakpoints[k] - seg.params.half_span))
    }

    /// Uniform samples for topology checks: every segment endpoint plus
    /// `per_segment` interior points at cell centres, which keeps samples off
    /// the integer grid positions where crossings occur.
    pub fn sample(&self, per_segment: usize) -> Vec<Point3> {
        let mut out = Vec::with_capacity(self.segments.len() * (per_segment + 1) + 1);
        out.push(self.segments[0].start());
        for seg in &self.segments {
            let s = seg.params.half_span;
            for j in 0..per_segment {
                let r = -s + (j as f64 + 0.5) * 2.0 * s / per_segment as f64;
                out.push(seg.eval(r));
            }
            out.push(seg.end());
        }
        out
    }

    pub fn lowest_point(&self) -> f64 {
        self.segments.iter().map(|s| s.lowest.z).fold(f64::INFINITY, f64::min)
    }
}

/// Free function form of [`MultiCatenaryCurve::eval`].
pub fn eval_curve(curve: &MultiCatenaryCurve, t: f64) -> Result<Point3, CatenaryError> {
    curve.eval(t)
}

/// Height of the over-curve minus the under-curve on the vertical line where
/// their planes meet, for each crossing. Positive means the crossing holds.
pub fn crossing_clearances(
    curve: &MultiCatenaryCurve,
    crossings: &[PlanarCrossing],
) -> Result<Vec<f64>, CatenaryError> {
    crossings
        .iter()
        .map(|c| {
            let over = curve.segments.get(c.over).ok_or(CatenaryError::BadIndex(c.over))?;
            let under = curve.segments.get(c.under).ok_or(CatenaryError::BadIndex(c.under))?;
            clearance_between(over, under)
        })
        .collect()
}

/// Clearance of `over` above `under` where their vertical planes intersect.
pub fn clearance_between(over: &CatenarySegment, under: &CatenarySegment) -> Result<f64, CatenaryError> {
    let (u, v) = (over.direction(), under.direction());
    let det = u.x * v.y - u.y * v.x;
    if det.abs() < 1e-12 {
        return Err(CatenaryError::ParallelPlanes);
    }
    // over.lowest + α·u = under.lowest + β·v in the plane
    let (dx, dy) = (under.lowest.x - over.lowest.x, under.lowest.y - over.lowest.y);
    let alpha = (dx * v.y - dy * v.x) / det;
    let x = over.lowest.x + alpha * u.x;
    let y = over.lowest.y + alpha * u.y;
    Ok(over.height_at(x, y) - under.height_at(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    const ACOSH2: f64 = 1.3169578969248166;

    #[test]
    fn segment_from_symmetric_points() {
        let seg = make_segment(Point3::new(0.0, -ACOSH2, 5.0), Point3::new(0.0, ACOSH2, 5.0), 1.0, 1e-12).unwrap();
        assert!((seg.params.shape - 1.0).abs() < 1e-9);
        assert!((seg.lowest - Point3::new(0.0, 0.0, 4.0)).norm() < 1e-12);
        assert!((seg.heading - FRAC_PI_2).abs() < 1e-15);
        assert!((seg.start() - Point3::new(0.0, -ACOSH2, 5.0)).norm() < 1e-9);
        assert!((seg.end() - Point3::new(0.0, ACOSH2, 5.0)).norm() < 1e-9);
    }

    #[test]
    fn segment_errors() {
        let p = Point3::new(1.0, 1.0, 3.0);
        assert!(matches!(make_segment(p, p, 1.0, 1e-12), Err(CatenaryError::CoincidentEndpoints)));
        assert!(matches!(
            make_segment(p, Point3::new(2.0, 1.0, 3.5), 1.0, 1e-12),
            Err(CatenaryError::UnequalHeights { .. })
        ));
        assert!(make_segment(p, Point3::new(2.0, 1.0, 3.0), -1.0, 1e-12).is_err());
    }

    #[test]
    fn compose_single_and_gap() {
        let a = make_segment(Point3::new(0.0, 0.0, 3.0), Point3::new(2.0, 0.0, 3.0), 1.0, 1e-12).unwrap();
        let curve = compose(vec![a]).unwrap();
        assert_eq!(curve.breakpoints, vec![0.0, 2.0]);
        let b = make_segment(Point3::new(2.1, 0.0, 3.0), Point3::new(2.1, 2.0, 3.0), 1.0, 1e-12).unwrap();
        assert!(matches!(compose(vec![a, b]), Err(CatenaryError::Discontinuous { index: 1, .. })));
        assert!(matches!(compose(vec![]), Err(CatenaryError::EmptyCurve)));
    }

    #[test]
    fn curve_eval_continuity() {
        let p = [Point3::new(0.0, 0.0, 3.0), Point3::new(2.0, 0.0, 3.0), Point3::new(2.0, 3.0, 3.0)];
        let a = make_segment(p[0], p[1], 1.0, 1e-12).unwrap();
        let b = make_segment(p[1], p[2], 0.5, 1e-12).unwrap();
        let curve = compose(vec![a, b]).unwrap();
        assert!((curve.eval(0.0).unwrap() - p[0]).norm() < 1e-9);
        assert!((curve.eval(5.0).unwrap() - p[2]).norm() < 1e-9);
        let q2 = curve.breakpoints[1];
        let left = curve.eval(q2).unwrap();
        let right = curve.eval(q2 + 1e-13).unwrap();
        assert!((left - p[1]).norm() < 1e-9);
        assert!((left - right).norm() < 1e-9);
        assert!(curve.eval(-0.1).is_err());
        assert!(curve.eval(5.1).is_err());
        assert!(curve.eval(f64::NAN).is_err());
    }

    #[test]
    fn equal_crossing_has_zero_clearance() {
        let a = make_segment(Point3::new(-1.0, 0.0, 3.0), Point3::new(1.0, 0.0, 3.0), 1.0, 1e-12).unwrap();
        let b = make_segment(Point3::new(0.0, -1.0, 3.0), Point3::new(0.0, 1.0, 3.0), 1.0, 1e-12).unwrap();
        assert!(clearance_between(&a, &b).unwrap().abs() < 1e-12);
        let c = make_segment(Point3::new(0.0, -1.0, 3.0), Point3::new(0.0, 1.0, 3.0), 2.0, 1e-12).unwrap();
        assert!((clearance_between(&a, &c).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(clearance_between(&a, &a), Err(CatenaryError::ParallelPlanes)));
    }

    #[test]
    fn samples_include_endpoints() {
        let a = make_segment(Point3::new(0.0, 0.0, 3.0), Point3::new(2.0, 0.0, 3.0), 1.0, 1e-12).unwrap();
        let curve = compose(vec![a]).unwrap();
        let s = curve.sample(4);
        assert_eq!(s.len(), 6);
        assert!((s[0] - a.start()).norm() < 1e-12);
        assert!((s[5] - a.end()).norm() < 1e-12);
        assert!((s[1].x - 0.25).abs() < 1e-12);
    }
}
