//! Realizes a Gauss code as a grid diagram too large for exhaustive search.
//!
//! Each code entry becomes one grid segment (over passes are column
//! segments, under passes row segments). Two extra corners are spliced in
//! after entries `e1` and `e2`, giving `2c + 4` segments on an `(c + 2)²`
//! grid. Simulated annealing then permutes the column and row positions
//! until every labelled pair crosses and no other pair does.
//!
//! Usage: `cargo run --release --example grid_anneal -- "<gauss code>" [name]`
//!
//! The bundled Carrick mat diagram was produced with
//! `"1+ 2- 4+ 5- 7+ 8- 2+ 3- 5+ 6- 8+ 1- 3+ 4- 6+ 7-" carrick`.

use knotfold::io::GridFile;
use knotfold::knot::{open_diagram, parse_gauss_code, planar_gauss_code, trace_polyline, GaussCode, GridDiagram, Pass};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Col,
    Row,
}

struct Layout {
    kinds: Vec<Kind>,
    labels: Vec<Option<u32>>,
}

fn layout(code: &GaussCode, e1: usize, e2: usize) -> Layout {
    let mut kinds = Vec::new();
    let mut labels = Vec::new();
    for (k, e) in code.entries().iter().enumerate() {
        let kind = if e.pass == Pass::Over { Kind::Col } else { Kind::Row };
        kinds.push(kind);
        labels.push(Some(e.label));
        if k == e1 || k == e2 {
            let (a, b) = if kind == Kind::Col { (Kind::Row, Kind::Col) } else { (Kind::Col, Kind::Row) };
            kinds.extend([a, b]);
            labels.extend([None, None]);
        }
    }
    Layout { kinds, labels }
}

/// (column segment, row segment, should cross)
fn pairs(l: &Layout) -> Vec<(usize, usize, bool)> {
    let m = l.kinds.len();
    let mut out = Vec::new();
    for v in (0..m).filter(|&i| l.kinds[i] == Kind::Col) {
        for h in (0..m).filter(|&i| l.kinds[i] == Kind::Row) {
            let gap = (v + m - h) % m;
            if gap == 1 || gap == m - 1 {
                continue;
            }
            let want = l.labels[v].is_some() && l.labels[v] == l.labels[h];
            out.push((v, h, want));
        }
    }
    out
}

fn cost(pos: &[usize], pairs: &[(usize, usize, bool)], m: usize) -> usize {
    let between = |x: usize, a: usize, b: usize| a.min(b) < x && x < a.max(b);
    pairs
        .iter()
        .filter(|&&(v, h, want)| {
            let crosses = between(pos[h], pos[(v + m - 1) % m], pos[(v + 1) % m])
                && between(pos[v], pos[(h + m - 1) % m], pos[(h + 1) % m]);
            crosses != want
        })
        .count()
}

fn anneal(l: &Layout, iters: usize, seed: u64) -> Option<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = l.kinds.len();
    let cols: Vec<usize> = (0..m).filter(|&i| l.kinds[i] == Kind::Col).collect();
    let rows: Vec<usize> = (0..m).filter(|&i| l.kinds[i] == Kind::Row).collect();
    let mut pos = vec![0; m];
    for group in [&cols, &rows] {
        let mut slots: Vec<usize> = (0..group.len()).collect();
        for k in (1..slots.len()).rev() {
            slots.swap(k, rng.gen_range(0..=k));
        }
        for (k, &i) in group.iter().enumerate() {
            pos[i] = slots[k];
        }
    }
    let pairs = pairs(l);
    let mut current = cost(&pos, &pairs, m);
    let mut temperature = 2.0f64;
    for _ in 0..iters {
        if current == 0 {
            return Some(pos);
        }
        let group = if rng.gen_bool(0.5) { &cols } else { &rows };
        let a = group[rng.gen_range(0..group.len())];
        let b = group[rng.gen_range(0..group.len())];
        if a == b {
            continue;
        }
        pos.swap(a, b);
        let next = cost(&pos, &pairs, m);
        if next <= current || rng.gen::<f64>() < ((current as f64 - next as f64) / temperature).exp() {
            current = next;
        } else {
            pos.swap(a, b);
        }
        temperature = (temperature * 0.9999).max(0.05);
    }
    (current == 0).then_some(pos)
}

/// Corner between consecutive segments, markers alternating along the path.
fn to_grid(l: &Layout, pos: &[usize]) -> GridDiagram {
    let m = l.kinds.len();
    let n = m / 2;
    let mut cells = vec![vec![0i8; n]; n];
    for k in 0..m {
        let next = (k + 1) % m;
        let (col, row) = if l.kinds[k] == Kind::Col { (pos[k], pos[next]) } else { (pos[next], pos[k]) };
        cells[row][col] = if k % 2 == 0 { 1 } else { -1 };
    }
    GridDiagram::new(cells)
}

fn accept(grid: &GridDiagram, code: &GaussCode) -> bool {
    let Ok(og) = open_diagram(grid) else { return false };
    let Ok(poly) = trace_polyline(&og, 1.0, 1.0) else { return false };
    planar_gauss_code(&poly).is_ok_and(|c| c.equivalent(code))
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let code = parse_gauss_code(args.get(1).map(String::as_str).unwrap_or("")).expect("valid Gauss code");
    let name = args.get(2).cloned().unwrap_or_else(|| "knot".into());
    let len = code.len();
    for e1 in 0..len {
        for e2 in (e1 + 1)..len {
            let l = layout(&code, e1, e2);
            for seed in 0..3 {
                if let Some(pos) = anneal(&l, 60_000, seed) {
                    let grid = to_grid(&l, &pos);
                    if accept(&grid, &code) {
                        eprintln!("found with extra corners after entries {e1}, {e2} (seed {seed})");
                        let file = GridFile {
                            name: Some(name),
                            gauss: Some(code.clone()),
                            provenance: Some(format!(
                                "search-derived: grid_anneal example, extra corners after entries {e1} and {e2}, seed {seed}"
                            )),
                            ..GridFile::from_grid(&grid)
                        };
                        print!("{}", file.to_json());
                        return;
                    }
                }
            }
        }
    }
    eprintln!("no diagram found");
    std::process::exit(2);
}
