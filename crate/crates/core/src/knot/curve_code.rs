use serde::Serialize;

use super::gauss::{GaussCode, GaussEntry, Pass};
use super::KnotError;
use crate::geometry::{intersect_xy, Point3, SegmentHit};

/// Height difference below which a crossing is considered a tie (meters).
pub const Z_TIE: f64 = 1e-6;

/// Segment-parameter band around sample endpoints treated as degenerate.
const ENDPOINT_EPS: f64 = 1e-9;

/// One self-intersection of the projected sample polyline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveCrossing {
    /// Sample-segment index of the upper strand.
    pub upper: usize,
    /// Sample-segment index of the lower strand.
    pub lower: usize,
    pub point: [f64; 2],
    /// Height of the upper strand minus the lower strand (> 0).
    pub dz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveCrossings {
    pub code: GaussCode,
    pub crossings: Vec<CurveCrossing>,
}

impl CurveCrossings {
    pub fn min_dz(&self) -> Option<f64> {
        self.crossings.iter().map(|c| c.dz).reduce(f64::min)
    }
}

/// Gauss code of a sampled 3D curve seen from above.
pub fn gauss_code_of_curve(samples: &[Point3], closure: bool) -> Result<GaussCode, KnotError> {
    curve_crossings(samples, closure).map(|c| c.code)
}

/// Finds every crossing between non-adjacent segments of the projected
/// sample polyline (and the closing segment if `closure`) and emits the
/// crossings in traversal order. The higher strand is Over.
pub fn curve_crossings(samples: &[Point3], closure: bool) -> Result<CurveCrossings, KnotError> {
    if samples.len() < 3 {
        return Err(KnotError::TooFewSamples { needed: 3, got: samples.len() });
    }
    let m = if closure { samples.len() } else { samples.len() - 1 };
    let seg = |k: usize| (samples[k], samples[(k + 1) % samples.len()]);

    // sweep over segments ordered by their smallest x
    let mut order: Vec<usize> = (0..m).collect();
    let bounds: Vec<(f64, f64, f64, f64)> = (0..m)
        .map(|k| {
            let (a, b) = seg(k);
            (a.x.min(b.x), a.x.max(b.x), a.y.min(b.y), a.y.max(b.y))
        })
        .collect();
    order.sort_by(|&i, &j| bounds[i].0.total_cmp(&bounds[j].0).then(i.cmp(&j)));

    let adjacent = |i: usize, j: usize| {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        hi == lo + 1 || (closure && lo == 0 && hi == m - 1)
    };

    let mut found = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        let bi = bounds[i];
        for &j in &order[pos + 1..] {
            let bj = bounds[j];
            if bj.0 > bi.1 {
                break;
            }
            if bj.3 < bi.2 || bj.2 > bi.3 || adjacent(i, j) {
                continue;
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            let (a0, a1) = seg(a);
            let (b0, b1) = seg(b);
            match intersect_xy(&a0, &a1, &b0, &b1, ENDPOINT_EPS) {
                SegmentHit::Miss => {}
                SegmentHit::Degenerate { .. } => {
                    return Err(KnotError::DegenerateCrossing {
                        a,
                        b,
                        reason: "intersection at a sample endpoint or collinear overlap".into(),
                    })
                }
                SegmentHit::Cross { t, u } => {
                    let za = a0.z + (a1.z - a0.z) * t;
                    let zb = b0.z + (b1.z - b0.z) * u;
                    let dz = za - zb;
                    if dz.abs() < Z_TIE {
                        return Err(KnotError::DegenerateCrossing {
                            a,
                            b,
                            reason: format!("height tie |dz| = {:.3e}", dz.abs()),
                        });
                    }
                    let p = a0 + (a1 - a0) * t;
                    found.push((a, t, b, u, dz, [p.x, p.y]));
                }
            }
        }
    }
    // deterministic crossing ids independent of sweep order
    found.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)).then(x.2.cmp(&y.2)));

    let mut events: Vec<(usize, f64, u32, Pass)> = Vec::with_capacity(2 * found.len());
    let mut crossings = Vec::with_capacity(found.len());
    for (id, &(a, t, b, u, dz, point)) in found.iter().enumerate() {
        let (pa, pb) = if dz > 0.0 { (Pass::Over, Pass::Under) } else { (Pass::Under, Pass::Over) };
        events.push((a, t, id as u32 + 1, pa));
        events.push((b, u, id as u32 + 1, pb));
        let (upper, lower) = if dz > 0.0 { (a, b) } else { (b, a) };
        crossings.push(CurveCrossing { upper, lower, point, dz: dz.abs() });
    }
    events.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let entries = events.into_iter().map(|(_, _, label, pass)| GaussEntry { label, pass }).collect();
    let code = GaussCode::from_traversal(entries)?;
    Ok(CurveCrossings { code, crossings })
}
