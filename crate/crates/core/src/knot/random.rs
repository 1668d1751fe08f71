use rand::seq::SliceRandom;
use rand::Rng;

use super::grid::{open_diagram, GridDiagram};

/// Uniformly random valid `n×n` grid diagram; it may describe a link.
///
/// # Panics
/// If `n < 2`.
pub fn random_grid<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GridDiagram {
    assert!(n >= 2, "grid diagrams need n >= 2");
    let mut plus: Vec<usize> = (0..n).collect();
    let mut minus: Vec<usize> = (0..n).collect();
    loop {
        plus.shuffle(rng);
        minus.shuffle(rng);
        if plus.iter().zip(&minus).all(|(a, b)| a != b) {
            return GridDiagram::from_markers(&plus, &minus);
        }
    }
}

/// Random single-component diagram that can be opened, or `None` after
/// `tries` rejected draws.
pub fn random_knot_grid<R: Rng + ?Sized>(n: usize, rng: &mut R, tries: usize) -> Option<GridDiagram> {
    (0..tries).map(|_| random_grid(n, rng)).find(|g| open_diagram(g).is_ok())
}
