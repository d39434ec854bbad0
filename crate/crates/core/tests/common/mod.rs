#![allow(dead_code)]

use simshell_core::generate::{generate, GenSpec};
use simshell_core::{KripkeStructure, StateRelation};

pub const DENSITIES: [f64; 10] = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// The four-state running example with states 1..4 mapped to 0..3.
pub fn esempio() -> KripkeStructure {
    KripkeStructure::from_label_ids(4, &[(0, 0), (0, 2), (1, 2), (2, 3), (3, 3)], &[0, 0, 0, 1]).unwrap()
}

/// Its simulation preorder, `(s, t)` meaning `t` simulates `s`.
pub fn esempio_preorder() -> StateRelation {
    StateRelation::from_pairs(4, [(0, 0), (1, 1), (1, 0), (2, 2), (3, 3)])
}

/// Parameters of sweep instance `i`: sizes 1..8, 1..3 labels, ten
/// densities, both totality modes.
pub fn sweep_spec(i: u64) -> GenSpec {
    GenSpec {
        num_states: 1 + (i % 8) as usize,
        num_labels: 1 + ((i / 8) % 3) as usize,
        edge_density: DENSITIES[((i / 24) % 10) as usize],
        total: (i / 240) % 2 == 0,
        seed: i,
    }
}

pub fn sweep_instance(i: u64) -> KripkeStructure {
    generate(&sweep_spec(i)).unwrap()
}
