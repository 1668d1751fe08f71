use std::fmt;

use serde::{Deserialize, Serialize};

use super::KnotError;

/// N×N grid diagram. Cell `(row, col)` holds +1, -1 or 0.
///
/// A valid diagram has exactly one +1 and one -1 in every row and column.
/// Validity is checked by [`GridDiagram::validate`], not at construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridDiagram {
    pub n: usize,
    pub cells: Vec<Vec<i8>>,
}

/// One invariant breach found by [`GridDiagram::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum GridViolation {
    Shape { expected: usize, row: usize, len: usize },
    BadValue { row: usize, col: usize, value: i8 },
    Row { row: usize, plus: usize, minus: usize },
    Column { col: usize, plus: usize, minus: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridReport {
    pub violations: Vec<GridViolation>,
}

impl fmt::Display for GridReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            match v {
                GridViolation::Shape { expected, row, len } => {
                    write!(f, "row {row} has {len} cells, expected {expected}")?
                }
                GridViolation::BadValue { row, col, value } => {
                    write!(f, "cell ({row},{col}) holds {value}")?
                }
                GridViolation::Row { row, plus, minus } => {
                    write!(f, "row {row} has {plus} (+1) and {minus} (-1)")?
                }
                GridViolation::Column { col, plus, minus } => {
                    write!(f, "column {col} has {plus} (+1) and {minus} (-1)")?
                }
            }
        }
        Ok(())
    }
}

/// Which grid line a path segment lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SegmentKind {
    /// Joins the two markers of one row. Always the lower strand at a crossing.
    Row,
    /// Joins the two markers of one column. Always the upper strand.
    Column,
}

impl GridDiagram {
    pub fn new(cells: Vec<Vec<i8>>) -> Self {
        GridDiagram { n: cells.len(), cells }
    }

    /// Diagram from the column positions of the +1 and -1 markers in each row.
    pub fn from_markers(plus: &[usize], minus: &[usize]) -> Self {
        let n = plus.len();
        let mut cells = vec![vec![0i8; n]; n];
        for r in 0..n {
            cells[r][plus[r]] = 1;
            cells[r][minus[r]] = -1;
        }
        GridDiagram { n, cells }
    }

    pub fn validate(&self) -> Result<(), GridReport> {
        let n = self.n;
        let mut violations = Vec::new();
        for (row, cells) in self.cells.iter().enumerate() {
            if cells.len() != n {
                violations.push(GridViolation::Shape { expected: n, row, len: cells.len() });
            }
        }
        if self.cells.len() != n {
            violations.push(GridViolation::Shape { expected: n, row: self.cells.len(), len: 0 });
        }
        if !violations.is_empty() {
            return Err(GridReport { violations });
        }
        for (row, cells) in self.cells.iter().enumerate() {
            for (col, &value) in cells.iter().enumerate() {
                if !(-1..=1).contains(&value) {
                    violations.push(GridViolation::BadValue { row, col, value });
                }
            }
            let plus = cells.iter().filter(|&&v| v == 1).count();
            let minus = cells.iter().filter(|&&v| v == -1).count();
            if plus != 1 || minus != 1 {
                violations.push(GridViolation::Row { row, plus, minus });
            }
        }
        for col in 0..n {
            let plus = (0..n).filter(|&r| self.cells[r][col] == 1).count();
            let minus = (0..n).filter(|&r| self.cells[r][col] == -1).count();
            if plus != 1 || minus != 1 {
                violations.push(GridViolation::Column { col, plus, minus });
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(GridReport { violations })
        }
    }

    /// The two marker columns of `row`, sorted. Assumes a valid diagram.
    pub(crate) fn row_span(&self, row: usize) -> (usize, usize) {
        let mut it = self.cells[row].iter().enumerate().filter(|(_, &v)| v != 0).map(|(c, _)| c);
        let a = it.next().expect("row marker");
        let b = it.next().expect("row marker");
        (a, b)
    }

    /// The two marker rows of `col`, sorted. Assumes a valid diagram.
    pub(crate) fn col_span(&self, col: usize) -> (usize, usize) {
        let mut it = (0..self.n).filter(|&r| self.cells[r][col] != 0);
        let a = it.next().expect("column marker");
        let b = it.next().expect("column marker");
        (a, b)
    }

    /// True if the column segment of `col` crosses the row segment of `row`.
    pub(crate) fn segments_cross(&self, row: usize, col: usize) -> bool {
        let (c0, c1) = self.row_span(row);
        let (r0, r1) = self.col_span(col);
        c0 < col && col < c1 && r0 < row && row < r1
    }

    pub fn crossing_count(&self) -> usize {
        (0..self.n).map(|r| (0..self.n).filter(|&c| self.segments_cross(r, c)).count()).sum()
    }

    /// Closed traversal of the markers, alternating row and column moves,
    /// starting at `start` with a row move. Returns the visited corners of the
    /// component through `start`.
    pub(crate) fn cycle_from(&self, start: (usize, usize)) -> Vec<(usize, usize)> {
        let mut out = vec![start];
        let mut cur = start;
        let mut row_move = true;
        loop {
            let next = if row_move {
                let (a, b) = self.row_span(cur.0);
                (cur.0, if a == cur.1 { b } else { a })
            } else {
                let (a, b) = self.col_span(cur.1);
                (if a == cur.0 { b } else { a }, cur.1)
            };
            row_move = !row_move;
            if next == start {
                break;
            }
            out.push(next);
            cur = next;
        }
        out
    }

    /// Number of closed components (1 for a knot, more for a link).
    pub fn component_count(&self) -> usize {
        let mut seen = vec![vec![false; self.n]; self.n];
        let mut count = 0;
        for r in 0..self.n {
            for c in 0..self.n {
                if self.cells[r][c] != 0 && !seen[r][c] {
                    count += 1;
                    for (rr, cc) in self.cycle_from((r, c)) {
                        seen[rr][cc] = true;
                    }
                }
            }
        }
        count
    }

    /// A corner is eligible for opening if neither its row segment nor its
    /// column segment takes part in any crossing.
    pub fn corner_is_eligible(&self, row: usize, col: usize) -> bool {
        if self.cells[row][col] == 0 {
            return false;
        }
        let row_free = (0..self.n).all(|c| !self.segments_cross(row, c));
        let col_free = (0..self.n).all(|r| !self.segments_cross(r, col));
        row_free && col_free
    }

    /// Swaps rows `a` and `b`.
    pub fn swap_rows(&mut self, a: usize, b: usize) {
        self.cells.swap(a, b);
    }

    /// Swaps columns `a` and `b`.
    pub fn swap_cols(&mut self, a: usize, b: usize) {
        for row in &mut self.cells {
            row.swap(a, b);
        }
    }

    /// Transposed diagram.
    pub fn transposed(&self) -> GridDiagram {
        let cells = (0..self.n).map(|c| (0..self.n).map(|r| self.cells[r][c]).collect()).collect();
        GridDiagram { n: self.n, cells }
    }
}

impl fmt::Display for GridDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.cells {
            let line: Vec<String> = row.iter().map(|v| format!("{v:>2}")).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Free function form of [`GridDiagram::validate`].
pub fn validate_grid(g: &GridDiagram) -> Result<(), GridReport> {
    g.validate()
}

/// A grid diagram with one crossing-free corner zeroed, leaving an open path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenGridDiagram {
    pub base: GridDiagram,
    /// `(row, col)` of the removed corner.
    pub removed: (usize, usize),
}

impl OpenGridDiagram {
    /// Cells with the removed corner set to 0.
    pub fn cells(&self) -> Vec<Vec<i8>> {
        let mut cells = self.base.cells.clone();
        cells[self.removed.0][self.removed.1] = 0;
        cells
    }

    /// Corners of the open path in cable order. The path starts at the
    /// removed corner's column partner, so its first leg is a row segment,
    /// and ends at the row partner.
    pub fn path(&self) -> Vec<(usize, usize)> {
        let (r, c) = self.removed;
        let (a, b) = self.base.col_span(c);
        let column_partner = (if a == r { b } else { a }, c);
        // cycle_from starts with a row move, which is what we need from the
        // column partner
        let cycle = self.base.cycle_from(column_partner);
        cycle.into_iter().take_while(|&p| p != self.removed).collect()
    }
}

/// Opens the knot at the lowest (largest row index), then leftmost, corner
/// whose incident segments are crossing-free.
pub fn open_diagram(g: &GridDiagram) -> Result<OpenGridDiagram, KnotError> {
    g.validate().map_err(KnotError::InvalidGrid)?;
    let components = g.component_count();
    if components != 1 {
        return Err(KnotError::NotAKnot { components });
    }
    for row in (0..g.n).rev() {
        for col in 0..g.n {
            if g.corner_is_eligible(row, col) {
                return Ok(OpenGridDiagram { base: g.clone(), removed: (row, col) });
            }
        }
    }
    Err(KnotError::NoEligibleCorner)
}
