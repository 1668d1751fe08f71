//! Regenerates the bundled diagrams that exhaustive grid search can reach.
//!
//! Usage: `cargo run --release --example bundle_search -- <assets dir>`

use knotfold::io::GridFile;
use knotfold::knot::{grid_search, parse_gauss_code};

const KNOTS: [(&str, &str, usize); 2] = [("overhand", "1- 2+ 3- 1+ 2- 3+", 5), ("figure_eight", "1- 2+ 3- 4+ 2- 1+ 4- 3+", 6)];

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "crates/core/assets".into());
    for (name, text, n_max) in KNOTS {
        let code = parse_gauss_code(text).expect("valid code");
        let out = grid_search(&code, n_max);
        let grid = out.diagram.expect("diagram within the grid bound");
        let file = GridFile {
            name: Some(name.into()),
            gauss: Some(code),
            provenance: Some(format!("search-derived: exhaustive grid_search, N_max = {n_max}, first lexicographic hit")),
            ..GridFile::from_grid(&grid)
        };
        std::fs::write(format!("{dir}/{name}.json"), file.to_json()).expect("write asset");
        eprintln!("{name}: {}x{} after {} candidates in {:?}", grid.n, grid.n, out.candidates_examined, out.elapsed);
    }
}
