//! Sag of the under-passing catenaries that keeps every grid crossing apart.
//!
//! Worst case on an N×N grid of cell width `d` (extent `L = N·d`): the
//! under-curve spans the widest row, `s̄ = (L - d)/2`, and the crossing line
//! sits one cell from its endpoint, `r = s̄ - d = (L - 3d)/2`, where the curve
//! is highest. The over-curve is lowest when its vertex is on that line. The
//! crossing holds when
//!
//! ```text
//! h_max - h_min > ā·cosh(r/ā) - ā,   ā = a(h_max, s̄)
//! ```

use super::solve::{cosh_m1, solve_intrinsic};
use super::CatenaryError;

const MAX_ITERATIONS: usize = 10_000;
const DAMPING: f64 = 0.75;

/// Required clearance at the worst-case crossing, relative to `h_min`.
pub const MARGIN_FRACTION: f64 = 1e-3;

/// Half-span of the widest row and the worst-case crossing parameter.
pub fn worst_case_geometry(n: usize, d: f64) -> (f64, f64) {
    let extent = n as f64 * d;
    let s_bar = 0.5 * (extent - d);
    let r = (0.5 * (extent - 3.0 * d)).max(0.0);
    (s_bar, r)
}

/// Rise of the widest `h`-catenary above its vertex at the worst-case
/// crossing line.
pub fn worst_case_rise(h: f64, n: usize, d: f64, tol: f64) -> Result<f64, CatenaryError> {
    let (s_bar, r) = worst_case_geometry(n, d);
    let a_bar = solve_intrinsic(h, s_bar, tol)?;
    Ok(a_bar * cosh_m1(r / a_bar))
}

/// Smallest `h_max` with `h_max ≥ h_min + rise(h_max) + 1e-3·h_min`.
///
/// Damped fixed-point iteration from `h_min + d`; the map has slope below one
/// because the drop at a fixed distance from the endpoint grows with the sag.
/// The last iterate is nudged up if it lands just short of the bound.
pub fn h_max_bound(h_min: f64, n: usize, d: f64, tol: f64) -> Result<f64, CatenaryError> {
    if !(h_min > 0.0) || !h_min.is_finite() {
        return Err(CatenaryError::NonPositive { name: "h_min", value: h_min });
    }
    if !(d > 0.0) || !d.is_finite() {
        return Err(CatenaryError::NonPositive { name: "d", value: d });
    }
    if n < 2 {
        return Err(CatenaryError::GridTooSmall(n));
    }
    let margin = MARGIN_FRACTION * h_min;
    let target = |h: f64| -> Result<f64, CatenaryError> { Ok(h_min + margin + worst_case_rise(h, n, d, tol)?) };

    let mut h = h_min + d;
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let next = (1.0 - DAMPING) * h + DAMPING * target(h)?;
        let step = (next - h).abs();
        h = next;
        if step <= 1e-13 * h {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(CatenaryError::BoundDiverged { last: h });
    }
    let mut excess = h - target(h)?;
    let mut bumps = 0;
    while excess < 0.0 {
        h += (-excess).max(1e-15 * h) * 2.0;
        excess = h - target(h)?;
        bumps += 1;
        if bumps > 100 {
            return Err(CatenaryError::BoundDiverged { last: h });
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defining_inequality_holds() {
        for &(h_min, n, d) in &[(1.34, 5, 1.0), (2.89, 10, 2.0), (0.5, 7, 4.0), (3.0, 3, 0.5), (1.0, 2, 1.0)] {
            let h = h_max_bound(h_min, n, d, 1e-12).unwrap();
            let rise = worst_case_rise(h, n, d, 1e-12).unwrap();
            assert!(h - h_min > rise, "n={n}");
            assert!(h - h_min - rise >= MARGIN_FRACTION * h_min * (1.0 - 1e-9));
            assert!(h - h_min - rise <= MARGIN_FRACTION * h_min * (1.0 + 1e-6));
        }
    }

    #[test]
    fn small_grids_need_only_the_margin() {
        // N = 3: the crossing line passes through the vertex, rise = 0
        let h = h_max_bound(1.0, 3, 1.0, 1e-12).unwrap();
        assert!((h - 1.001).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(h_max_bound(0.0, 5, 1.0, 1e-12).is_err());
        assert!(h_max_bound(1.0, 5, -1.0, 1e-12).is_err());
        assert!(matches!(h_max_bound(1.0, 1, 1.0, 1e-12), Err(CatenaryError::GridTooSmall(1))));
    }
}
