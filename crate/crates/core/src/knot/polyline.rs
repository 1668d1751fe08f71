use serde::{Deserialize, Serialize};

use super::gauss::{GaussCode, GaussEntry, Pass};
use super::grid::{OpenGridDiagram, SegmentKind};
use super::KnotError;
use crate::geometry::{intersect_xy, Point3, SegmentHit};

/// Segment-parameter band treated as touching an endpoint.
const ENDPOINT_EPS: f64 = 1e-9;

/// A transversal crossing of the planar projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarCrossing {
    /// Index of the upper (column) segment.
    pub over: usize,
    /// Index of the lower (row) segment.
    pub under: usize,
    /// Intersection point in the grid plane.
    pub point: [f64; 2],
}

/// Opened grid diagram laid out in space: corner `(row, col)` sits at
/// `(d·row, d·col, z_p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotPolyline {
    pub points: Vec<Point3>,
    pub corners: Vec<(usize, usize)>,
    /// Kind of segment `k`, joining `points[k]` and `points[k + 1]`.
    pub kinds: Vec<SegmentKind>,
    pub crossings: Vec<PlanarCrossing>,
    pub grid_size: usize,
    pub cell_width: f64,
    pub plane_height: f64,
    /// Position of the removed corner; closes the path without new crossings.
    pub closing_anchor: Point3,
}

impl KnotPolyline {
    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn n_segments(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    /// Segment `k` as a pair of endpoints.
    pub fn segment(&self, k: usize) -> (Point3, Point3) {
        (self.points[k], self.points[k + 1])
    }
}

fn corner_point(corner: (usize, usize), d: f64, z_p: f64) -> Point3 {
    Point3::new(d * corner.0 as f64, d * corner.1 as f64, z_p)
}

/// Lays the opened diagram out as a polyline with `n = 2N - 1` points.
pub fn trace_polyline(og: &OpenGridDiagram, d: f64, z_p: f64) -> Result<KnotPolyline, KnotError> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(KnotError::BadParameter { name: "d", value: d });
    }
    if !(z_p > 0.0) || !z_p.is_finite() {
        return Err(KnotError::BadParameter { name: "z_p", value: z_p });
    }
    let n_grid = og.base.n;
    let corners = og.path();
    let expected = 2 * n_grid - 1;
    if corners.len() != expected {
        return Err(KnotError::Disconnected { found: corners.len(), expected });
    }
    let points: Vec<Point3> = corners.iter().map(|&c| corner_point(c, d, z_p)).collect();
    let kinds = corners
        .windows(2)
        .map(|w| if w[0].0 == w[1].0 { SegmentKind::Row } else { SegmentKind::Column })
        .collect::<Vec<_>>();
    let crossings = find_crossings(&points, &kinds, false)?;
    Ok(KnotPolyline {
        points,
        corners,
        kinds,
        crossings,
        grid_size: n_grid,
        cell_width: d,
        plane_height: z_p,
        closing_anchor: corner_point(og.removed, d, z_p),
    })
}

/// Transversal crossings among axis-aligned segments. With `closed`, the
/// last point connects back to the first.
fn find_crossings(
    points: &[Point3],
    kinds: &[SegmentKind],
    closed: bool,
) -> Result<Vec<PlanarCrossing>, KnotError> {
    let m = kinds.len();
    let mut out = Vec::new();
    for a in 0..m {
        for b in (a + 2)..m {
            if closed && a == 0 && b == m - 1 {
                continue;
            }
            let (a0, a1) = (points[a], points[(a + 1) % points.len()]);
            let (b0, b1) = (points[b], points[(b + 1) % points.len()]);
            match intersect_xy(&a0, &a1, &b0, &b1, ENDPOINT_EPS) {
                SegmentHit::Miss => {}
                SegmentHit::Degenerate { .. } => return Err(KnotError::Tangential { a, b }),
                SegmentHit::Cross { t, .. } => {
                    let (over, under) = match (kinds[a], kinds[b]) {
                        (SegmentKind::Column, SegmentKind::Row) => (a, b),
                        (SegmentKind::Row, SegmentKind::Column) => (b, a),
                        // axis-aligned segments of one kind are parallel
                        _ => return Err(KnotError::Tangential { a, b }),
                    };
                    let p = a0 + (a1 - a0) * t;
                    out.push(PlanarCrossing { over, under, point: [p.x, p.y] });
                }
            }
        }
    }
    Ok(out)
}

/// Gauss code of the polyline closed through the removed corner, with column
/// segments passing over row segments. Labels follow first encounter.
pub fn planar_gauss_code(poly: &KnotPolyline) -> Result<GaussCode, KnotError> {
    let mut closed_points = poly.points.clone();
    closed_points.push(poly.closing_anchor);
    let mut kinds = poly.kinds.clone();
    if poly.n_points() >= 2 {
        let last = *poly.points.last().expect("points");
        let first = poly.points[0];
        let anchor = poly.closing_anchor;
        kinds.push(if last.x == anchor.x { SegmentKind::Row } else { SegmentKind::Column });
        kinds.push(if anchor.x == first.x { SegmentKind::Row } else { SegmentKind::Column });
    }
    let crossings = find_crossings(&closed_points, &kinds, true)?;
    // (segment, position along it, crossing id, pass)
    let mut events: Vec<(usize, f64, u32, Pass)> = Vec::with_capacity(2 * crossings.len());
    for (id, c) in crossings.iter().enumerate() {
        for (seg, pass) in [(c.over, Pass::Over), (c.under, Pass::Under)] {
            let start = closed_points[seg];
            let dist = (c.point[0] - start.x).abs() + (c.point[1] - start.y).abs();
            events.push((seg, dist, id as u32 + 1, pass));
        }
    }
    events.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let entries = events.into_iter().map(|(_, _, label, pass)| GaussEntry { label, pass }).collect();
    GaussCode::from_traversal(entries)
}
