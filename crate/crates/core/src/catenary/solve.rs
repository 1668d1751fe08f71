//! Scalar catenary relations in the normalized variable `x = s / a`.

use super::CatenaryError;
use crate::Point3;

/// Largest `x = s/a` accepted before cosh/sinh are considered to overflow.
pub const MAX_ARGUMENT: f64 = 700.0;

const BISECTION_REL_WIDTH: f64 = 1e-3;
const MAX_NEWTON_STEPS: usize = 100;

/// `cosh(x) - 1` without cancellation for small `x`.
pub fn cosh_m1(x: f64) -> f64 {
    let h = (0.5 * x).sinh();
    2.0 * h * h
}

/// `sinh(x) / x`, continuous at 0.
fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

fn sinhc_prime(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        x / 3.0 + x * x * x / 30.0
    } else {
        (x * x.cosh() - x.sinh()) / (x * x)
    }
}

/// Positive root of an increasing-after-negative residual `f` on `(0, ∞)`:
/// geometric bracketing, bisection down to a relative width of 1e-3, then
/// safeguarded Newton.
fn bracket_and_polish(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    x_guess: f64,
) -> Result<f64, CatenaryError> {
    let mut lo = 0.0;
    let mut hi = x_guess.clamp(1e-12, MAX_ARGUMENT);
    while f(hi) <= 0.0 {
        if hi >= MAX_ARGUMENT {
            return Err(CatenaryError::Degenerate("cosh/sinh argument exceeds overflow guard"));
        }
        lo = hi;
        hi = (hi * 2.0).min(MAX_ARGUMENT);
    }
    while (hi - lo) > BISECTION_REL_WIDTH * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_NEWTON_STEPS {
        let fx = f(x);
        if fx > 0.0 {
            hi = hi.min(x);
        } else {
            lo = lo.max(x);
        }
        let step = fx / df(x);
        let mut next = x - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x {
            x = next;
            break;
        }
        x = next;
    }
    Ok(x)
}

fn check_positive(name: &'static str, value: f64) -> Result<(), CatenaryError> {
    if !value.is_finite() {
        return Err(CatenaryError::NonFinite { name, value });
    }
    if value <= 0.0 {
        return Err(CatenaryError::NonPositive { name, value });
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<(), CatenaryError> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(CatenaryError::BadTolerance(tol));
    }
    Ok(())
}

/// Shape constant `a` of the catenary with sag `h` over half-span `s`, the
/// unique positive root of `h/a = cosh(s/a) - 1`.
pub fn solve_intrinsic(h: f64, s: f64, tol: f64) -> Result<f64, CatenaryError> {
    check_positive("h", h)?;
    check_positive("s", s)?;
    check_tol(tol)?;
    let k = h / s;
    // cosh(x) - 1 = k·x; for shallow cables x ≈ 2k
    let x = bracket_and_polish(|x| cosh_m1(x) - k * x, |x| x.sinh() - k, 2.0 * k)?;
    let a = s / x;
    if !a.is_finite() || x < 1e-150 {
        return Err(CatenaryError::Degenerate("taut cable: shape constant overflows"));
    }
    let residual = (h / a - cosh_m1(s / a)).abs();
    if residual > tol * (1.0 + h / a) {
        return Err(CatenaryError::NoConvergence { residual });
    }
    Ok(a)
}

/// Shape constant of a cable of length `length` hung between two points at
/// equal height `2s` apart: the root of `2a·sinh(s/a) = length`.
pub fn solve_from_length(length: f64, s: f64, tol: f64) -> Result<f64, CatenaryError> {
    check_positive("length", length)?;
    check_positive("s", s)?;
    check_tol(tol)?;
    let ratio = length / (2.0 * s);
    if ratio <= 1.0 {
        return Err(CatenaryError::Taut { length, span: 2.0 * s });
    }
    // sinh(x)/x ≈ 1 + x²/6 near the taut limit
    let guess = (6.0 * (ratio - 1.0)).sqrt().max(1e-6);
    let x = bracket_and_polish(|x| sinhc(x) - ratio, sinhc_prime, guess)?;
    let a = s / x;
    if !a.is_finite() {
        return Err(CatenaryError::Degenerate("taut cable: shape constant overflows"));
    }
    let residual = (arc_length(a, s) - length).abs();
    if residual > tol * length {
        return Err(CatenaryError::NoConvergence { residual });
    }
    Ok(a)
}

/// Catenary with its lowest point at the origin, in the yz-plane.
pub fn eval_local(a: f64, r: f64) -> Point3 {
    Point3::new(0.0, r, a * cosh_m1(r / a))
}

/// Length of the catenary arc over `[-s, s]`.
pub fn arc_length(a: f64, s: f64) -> f64 {
    2.0 * a * (s / a).sinh()
}

#[cfg(test)]
mod tests {
    use super::*;

    const ACOSH2: f64 = 1.3169578969248166;

    /// Plain bisection on the intrinsic equation in `a`; independent of the
    /// normalized solver.
    fn bisect_a(h: f64, s: f64) -> f64 {
        let f = |a: f64| h / a - ((s / a).cosh() - 1.0);
        let (mut lo, mut hi) = (1e-6 * s, 1e6 * s);
        // f < 0 below the root (cosh dominates), f > 0 above
        for _ in 0..400 {
            let mid = (lo * hi).sqrt();
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo * hi).sqrt()
    }

    #[test]
    fn acosh_identity() {
        let a = solve_intrinsic(1.0, ACOSH2, 1e-12).unwrap();
        assert!((a - 1.0).abs() < 1e-9);
    }

    #[test]
    fn matches_bisection_oracle() {
        let a = solve_intrinsic(1.34, 0.5, 1e-12).unwrap();
        let oracle = bisect_a(1.34, 0.5);
        assert!(((a - oracle) / oracle).abs() < 1e-9, "{a} vs {oracle}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(solve_intrinsic(-1.0, 1.0, 1e-12), Err(CatenaryError::NonPositive { .. })));
        assert!(matches!(solve_intrinsic(1.0, 0.0, 1e-12), Err(CatenaryError::NonPositive { .. })));
        assert!(matches!(solve_intrinsic(f64::NAN, 1.0, 1e-12), Err(CatenaryError::NonFinite { .. })));
        assert!(matches!(solve_intrinsic(1.0, 1.0, 0.1), Err(CatenaryError::BadTolerance(_))));
        assert!(matches!(solve_intrinsic(1e300, 1e-3, 1e-12), Err(CatenaryError::Degenerate(_))));
    }

    #[test]
    fn from_length_identities() {
        let a = solve_from_length(2.0 * 3f64.sqrt(), ACOSH2, 1e-12).unwrap();
        assert!((a - 1.0).abs() < 1e-9);
        assert!(matches!(solve_from_length(2.0, 1.0, 1e-12), Err(CatenaryError::Taut { .. })));
        assert!(matches!(solve_from_length(1.5, 1.0, 1e-12), Err(CatenaryError::Taut { .. })));
    }

    #[test]
    fn from_length_matches_bisection() {
        // residual 2a·sinh(1/a) - 3 is decreasing in a
        let f = |a: f64| 2.0 * a * (1.0 / a).sinh() - 3.0;
        let (mut lo, mut hi) = (1e-3, 1e3);
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        let a = solve_from_length(3.0, 1.0, 1e-12).unwrap();
        assert!(((a - oracle) / oracle).abs() < 1e-9);
    }

    #[test]
    fn nearly_taut_cable() {
        let a = solve_from_length(2.0 * (1.0 + 1e-9), 1.0, 1e-12).unwrap();
        assert!(a > 1e3);
        assert!((arc_length(a, 1.0) - 2.0 * (1.0 + 1e-9)).abs() < 1e-11);
    }

    #[test]
    fn local_curve_points() {
        assert_eq!(eval_local(1.0, 0.0), Point3::zeros());
        let p = eval_local(1.0, ACOSH2);
        assert!((p.y - ACOSH2).abs() < 1e-15 && (p.z - 1.0).abs() < 1e-12);
        let q = eval_local(2.0, -2.0 * ACOSH2);
        assert!((q.y + 2.6339157938496336).abs() < 1e-12 && (q.z - 2.0).abs() < 1e-12);
    }

    #[test]
    fn arc_length_limits() {
        assert!((arc_length(1.0, ACOSH2) - 2.0 * 3f64.sqrt()).abs() < 1e-12);
        let s = 1e-6;
        assert!(((arc_length(1.0, s) - 2.0 * s) / s).abs() < 1e-10);
    }
}
