//! Shape of an inextensible cable hung between two arbitrary points.

use serde::{Deserialize, Serialize};

use crate::catenary::{cosh_m1, solve_from_length, DEFAULT_TOL};
use crate::Point3;

/// Slack below which a cable segment is drawn as a straight line.
pub const TAUT_TOL: f64 = 1e-9;
const VERTICAL_SPAN: f64 = 1e-9;

/// One cable segment between consecutive robots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CableSegment {
    /// Catenary in the vertical plane through both ends. `u` is the
    /// horizontal coordinate from `p0` towards `p1`, the vertex sits at
    /// `(u_vertex, z_vertex)`.
    Hanging { p0: Point3, p1: Point3, shape: f64, u_vertex: f64, z_vertex: f64 },
    /// Ends stacked vertically: the cable folds at `bottom` below them.
    Folded { p0: Point3, p1: Point3, bottom: f64 },
    /// Pulled taut, or stretched beyond its length.
    Straight { p0: Point3, p1: Point3 },
}

impl CableSegment {
    pub fn endpoints(&self) -> (Point3, Point3) {
        match *self {
            CableSegment::Hanging { p0, p1, .. } | CableSegment::Folded { p0, p1, .. } | CableSegment::Straight { p0, p1 } => {
                (p0, p1)
            }
        }
    }

    /// Lowest height reached by the cable.
    pub fn lowest(&self) -> f64 {
        match *self {
            CableSegment::Hanging { p0, p1, u_vertex, z_vertex, .. } => {
                let span = horizontal(p1 - p0).norm();
                if (0.0..=span).contains(&u_vertex) {
                    z_vertex
                } else {
                    p0.z.min(p1.z)
                }
            }
            CableSegment::Folded { bottom, .. } => bottom,
            CableSegment::Straight { p0, p1 } => p0.z.min(p1.z),
        }
    }

    /// Point at fraction `f ∈ [0, 1]` of the horizontal span (of the length
    /// for folded segments).
    pub fn eval(&self, f: f64) -> Point3 {
        match *self {
            CableSegment::Hanging { p0, p1, shape, u_vertex, z_vertex } => {
                let h = horizontal(p1 - p0);
                let span = h.norm();
                let u = f * span;
                let z = z_vertex + shape * cosh_m1((u - u_vertex) / shape);
                let mut p = p0 + h * f;
                p.z = z;
                p
            }
            CableSegment::Folded { p0, p1, bottom } => {
                let (d0, d1) = (p0.z - bottom, p1.z - bottom);
                let s = f * (d0 + d1);
                let xy = p0 + (p1 - p0) * f;
                let z = if s <= d0 { p0.z - s } else { bottom + (s - d0) };
                Point3::new(xy.x, xy.y, z)
            }
            CableSegment::Straight { p0, p1 } => p0 + (p1 - p0) * f,
        }
    }

    /// `per_segment` interior points at cell centres followed by the end.
    pub fn sample_into(&self, per_segment: usize, out: &mut Vec<Point3>) {
        for j in 0..per_segment {
            out.push(self.eval((j as f64 + 0.5) / per_segment as f64));
        }
        out.push(self.endpoints().1);
    }
}

fn horizontal(v: Point3) -> Point3 {
    Point3::new(v.x, v.y, 0.0)
}

/// A pair pulled further apart than its cable allows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Overstretch {
    pub pair: usize,
    pub deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CableState {
    pub segments: Vec<CableSegment>,
    pub violations: Vec<Overstretch>,
}

impl CableState {
    pub fn lowest(&self) -> f64 {
        self.segments.iter().map(|s| s.lowest()).fold(f64::INFINITY, f64::min)
    }

    /// Samples of the whole cable, closed through `anchor` if given.
    pub fn samples(&self, per_segment: usize, anchor: Option<Point3>) -> Vec<Point3> {
        let mut out = Vec::with_capacity(self.segments.len() * (per_segment + 1) + 2);
        if let Some(first) = self.segments.first() {
            out.push(first.endpoints().0);
        }
        for seg in &self.segments {
            seg.sample_into(per_segment, &mut out);
        }
        out.extend(anchor);
        out
    }
}

/// Hangs the cable of length `length` between `p0` and `p1`.
pub fn hang(p0: Point3, p1: Point3, length: f64) -> (CableSegment, Option<f64>) {
    let dist = (p1 - p0).norm();
    let slack = length - dist;
    if slack < -TAUT_TOL {
        return (CableSegment::Straight { p0, p1 }, Some(-slack));
    }
    if slack <= TAUT_TOL {
        return (CableSegment::Straight { p0, p1 }, None);
    }
    let span = horizontal(p1 - p0).norm();
    let v = p1.z - p0.z;
    if span < VERTICAL_SPAN {
        let bottom = 0.5 * (p0.z + p1.z - length);
        return (CableSegment::Folded { p0, p1, bottom }, None);
    }
    // the horizontal-equivalent length over the span: √(ℓ² - V²) = 2a·sinh(H/2a)
    let effective = (length * length - v * v).sqrt();
    match solve_from_length(effective, 0.5 * span, DEFAULT_TOL) {
        Ok(shape) => {
            let u_vertex = 0.5 * span - shape * (v / length).atanh();
            let z_vertex = p0.z - shape * cosh_m1(u_vertex / shape);
            if z_vertex.is_finite() {
                (CableSegment::Hanging { p0, p1, shape, u_vertex, z_vertex }, None)
            } else {
                (CableSegment::Straight { p0, p1 }, None)
            }
        }
        // too close to taut for the shape constant to be represented
        Err(_) => (CableSegment::Straight { p0, p1 }, None),
    }
}

/// Cable shape for robot positions `positions` joined by segments of
/// `lengths`; overstretched pairs are reported, not raised.
pub fn cable_state(positions: &[Point3], lengths: &[f64]) -> CableState {
    let mut segments = Vec::with_capacity(lengths.len());
    let mut violations = Vec::new();
    for (pair, (w, &len)) in positions.windows(2).zip(lengths).enumerate() {
        let (seg, over) = hang(w[0], w[1], len);
        segments.push(seg);
        if let Some(deficit) = over {
            violations.push(Overstretch { pair, deficit });
        }
    }
    CableState { segments, violations }
}
