//! Small planar/spatial helpers shared by the knot and curve code.

use nalgebra::Vector3;

/// 3D position or displacement in meters.
pub type Point3 = Vector3<f64>;

/// Result of intersecting two planar segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentHit {
    /// No common point.
    Miss,
    /// Proper crossing at parameters `t` on the first and `u` on the second segment.
    Cross { t: f64, u: f64 },
    /// Collinear overlap or a contact within `eps` of a segment endpoint.
    Degenerate { t: f64, u: f64 },
}

/// Intersects the xy-projections of segments `a0→a1` and `b0→b1`.
///
/// `eps` is the endpoint band in segment parameter units: hits with `t` or `u`
/// within `eps` of 0 or 1 are reported as [`SegmentHit::Degenerate`].
pub fn intersect_xy(a0: &Point3, a1: &Point3, b0: &Point3, b1: &Point3, eps: f64) -> SegmentHit {
    let r = (a1.x - a0.x, a1.y - a0.y);
    let s = (b1.x - b0.x, b1.y - b0.y);
    let qp = (b0.x - a0.x, b0.y - a0.y);
    let denom = r.0 * s.1 - r.1 * s.0;
    let rr = (r.0 * r.0 + r.1 * r.1).sqrt();
    let ss = (s.0 * s.0 + s.1 * s.1).sqrt();
    if denom.abs() <= 1e-14 * rr * ss {
        // parallel; only collinear overlap matters
        let cross_q = qp.0 * r.1 - qp.1 * r.0;
        if rr == 0.0 || cross_q.abs() > 1e-12 * rr * (qp.0.hypot(qp.1) + rr) {
            return SegmentHit::Miss;
        }
        let rlen2 = rr * rr;
        let t0 = (qp.0 * r.0 + qp.1 * r.1) / rlen2;
        let t1 = ((b1.x - a0.x) * r.0 + (b1.y - a0.y) * r.1) / rlen2;
        let (lo, hi) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
        if hi < -eps || lo > 1.0 + eps {
            return SegmentHit::Miss;
        }
        return SegmentHit::Degenerate { t: lo.clamp(0.0, 1.0), u: 0.0 };
    }
    let t = (qp.0 * s.1 - qp.1 * s.0) / denom;
    let u = (qp.0 * r.1 - qp.1 * r.0) / denom;
    if t < -eps || t > 1.0 + eps || u < -eps || u > 1.0 + eps {
        return SegmentHit::Miss;
    }
    if t <= eps || t >= 1.0 - eps || u <= eps || u >= 1.0 - eps {
        SegmentHit::Degenerate { t, u }
    } else {
        SegmentHit::Cross { t, u }
    }
}

/// Unit vector along the horizontal part of `v`, or `None` if it is vertical.
pub fn horizontal_unit(v: &Point3) -> Option<Point3> {
    let len = v.x.hypot(v.y);
    if len <= 0.0 {
        None
    } else {
        Some(Point3::new(v.x / len, v.y / len, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point3 {
        Point3::new(x, y, 0.0)
    }

    #[test]
    fn perpendicular_cross() {
        let hit = intersect_xy(&p(0.0, 0.0), &p(2.0, 0.0), &p(1.0, -1.0), &p(1.0, 3.0), 1e-9);
        match hit {
            SegmentHit::Cross { t, u } => {
                assert!((t - 0.5).abs() < 1e-15);
                assert!((u - 0.25).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn t_junction_is_degenerate() {
        let hit = intersect_xy(&p(0.0, 0.0), &p(2.0, 0.0), &p(1.0, 0.0), &p(1.0, 3.0), 1e-9);
        assert!(matches!(hit, SegmentHit::Degenerate { .. }));
    }

    #[test]
    fn collinear_overlap_and_disjoint() {
        let overlap = intersect_xy(&p(0.0, 0.0), &p(2.0, 0.0), &p(1.0, 0.0), &p(3.0, 0.0), 1e-9);
        assert!(matches!(overlap, SegmentHit::Degenerate { .. }));
        let apart = intersect_xy(&p(0.0, 0.0), &p(1.0, 0.0), &p(2.0, 0.0), &p(3.0, 0.0), 1e-9);
        assert_eq!(apart, SegmentHit::Miss);
        let parallel = intersect_xy(&p(0.0, 0.0), &p(1.0, 0.0), &p(0.0, 1.0), &p(1.0, 1.0), 1e-9);
        assert_eq!(parallel, SegmentHit::Miss);
    }
}
