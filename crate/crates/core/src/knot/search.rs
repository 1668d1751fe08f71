use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::gauss::GaussCode;
use super::grid::{open_diagram, GridDiagram};
use super::polyline::{planar_gauss_code, trace_polyline};

/// Largest grid size the exhaustive search accepts; the candidate count grows
/// like (N!)².
pub const MAX_SEARCH_SIZE: usize = 7;

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub diagram: Option<GridDiagram>,
    /// Candidates that passed the marker-placement rule, over all sizes tried.
    pub candidates_examined: u64,
    pub elapsed: Duration,
}

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    while let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) {
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor");
        p.swap(i, j);
        p[i + 1..].reverse();
        out.push(p.clone());
    }
    out
}

/// Cheap structural view of a candidate used to reject most of them before
/// any tracing.
struct Markers<'a> {
    plus: &'a [usize],
    minus: &'a [usize],
    plus_inv: Vec<usize>,
    minus_inv: Vec<usize>,
}

impl<'a> Markers<'a> {
    fn new(plus: &'a [usize], minus: &'a [usize]) -> Self {
        let n = plus.len();
        let mut plus_inv = vec![0; n];
        let mut minus_inv = vec![0; n];
        for r in 0..n {
            plus_inv[plus[r]] = r;
            minus_inv[minus[r]] = r;
        }
        Markers { plus, minus, plus_inv, minus_inv }
    }

    fn crossing_count(&self) -> usize {
        let n = self.plus.len();
        let mut count = 0;
        for r in 0..n {
            let (c0, c1) = minmax(self.plus[r], self.minus[r]);
            for c in (c0 + 1)..c1 {
                let (r0, r1) = minmax(self.plus_inv[c], self.minus_inv[c]);
                if r0 < r && r < r1 {
                    count += 1;
                }
            }
        }
        count
    }

    fn is_single_cycle(&self) -> bool {
        let n = self.plus.len();
        // walk: row move from the +1 to the -1 of the row, column move from
        // that -1 to the +1 of the column
        let mut row = 0;
        for step in 1..=n {
            let col = self.minus[row];
            row = self.plus_inv[col];
            if row == 0 {
                return step == n;
            }
        }
        false
    }
}

fn minmax(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Smallest grid diagram (N ≤ `n_max`) whose opened trace has the same
/// canonical Gauss code as `code`.
///
/// Candidates are enumerated lexicographically by the column of the +1 in
/// each row, then of the -1; the first match in that order is returned no
/// matter how the work is split across threads.
pub fn grid_search(code: &GaussCode, n_max: usize) -> SearchOutcome {
    let start = Instant::now();
    let target = code.canonical();
    let crossings = code.crossing_count();
    let examined = AtomicU64::new(0);
    let mut found = None;
    for n in 2..=n_max.min(MAX_SEARCH_SIZE) {
        // N×N grids hold at most (N-2)² crossings
        if n < 2 || crossings > (n - 2) * (n - 2) {
            continue;
        }
        let perms = permutations(n);
        found = perms.par_iter().find_map_first(|plus| {
            let mut local = 0u64;
            let hit = perms.iter().find_map(|minus| {
                if plus.iter().zip(minus).any(|(a, b)| a == b) {
                    return None;
                }
                local += 1;
                let m = Markers::new(plus, minus);
                if m.crossing_count() != crossings || !m.is_single_cycle() {
                    return None;
                }
                let g = GridDiagram::from_markers(plus, minus);
                let og = open_diagram(&g).ok()?;
                let poly = trace_polyline(&og, 1.0, 1.0).ok()?;
                let c = planar_gauss_code(&poly).ok()?;
                (c.canonical() == target).then_some(g)
            });
            examined.fetch_add(local, Ordering::Relaxed);
            hit
        });
        if found.is_some() {
            break;
        }
    }
    SearchOutcome {
        diagram: found,
        candidates_examined: examined.into_inner(),
        elapsed: start.elapsed(),
    }
}
