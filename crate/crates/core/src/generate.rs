//! Seeded random Kripke structures.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::ModelError;
use crate::model::KripkeStructure;

/// Parameters for i.i.d. random structures.
#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub num_states: usize,
    pub num_labels: usize,
    /// Probability of each ordered pair (self-loops included) being an edge.
    pub edge_density: f64,
    /// Give every sink one uniformly chosen successor.
    pub total: bool,
    pub seed: u64,
}

/// Labels are drawn uniformly from `p0..p{k-1}`, then edges pair by pair.
/// Deterministic for a fixed spec.
pub fn generate(spec: &GenSpec) -> Result<KripkeStructure, ModelError> {
    if spec.num_states == 0 {
        return Err(ModelError::EmptyStateSpace);
    }
    if spec.num_labels == 0 {
        return Err(ModelError::InvalidParameter("at least one label is required".into()));
    }
    if !(0.0..=1.0).contains(&spec.edge_density) {
        return Err(ModelError::InvalidParameter(format!(
            "edge density {} is outside [0, 1]",
            spec.edge_density
        )));
    }
    let n = spec.num_states;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let labels: Vec<u32> = (0..n).map(|_| rng.gen_range(0..spec.num_labels) as u32).collect();
    let mut edges = Vec::new();
    for s in 0..n {
        let before = edges.len();
        for t in 0..n {
            if rng.gen_bool(spec.edge_density) {
                edges.push((s, t));
            }
        }
        if spec.total && edges.len() == before {
            edges.push((s, rng.gen_range(0..n)));
        }
    }
    KripkeStructure::from_label_ids(n, &edges, &labels)
}

/// Parameters for the layered scaling family.
#[derive(Clone, Debug, PartialEq)]
pub struct LayeredSpec {
    pub num_states: usize,
    /// Number of groups arranged in a cycle.
    pub groups: usize,
    /// Mean out-degree; the fractional part is realised by coin flips.
    pub out_degree: f64,
    pub seed: u64,
}

/// States are split round-robin into a cycle of groups and every state
/// gets random successors in the next group only. Group 0 carries label
/// `p1`, all others `p0`, so the simulation classes are exactly the groups
/// whatever the size: the family keeps the number of classes fixed while
/// the transition count grows.
pub fn generate_layered(spec: &LayeredSpec) -> Result<KripkeStructure, ModelError> {
    let n = spec.num_states;
    let m = spec.groups;
    if m == 0 || n < m {
        return Err(ModelError::InvalidParameter(format!("{n} states cannot fill {m} groups")));
    }
    let group_size = n / m;
    if spec.out_degree < 1.0 || spec.out_degree.ceil() as usize > group_size {
        return Err(ModelError::InvalidParameter(format!(
            "out-degree {} must lie in [1, {group_size}]",
            spec.out_degree
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let group_of = |s: usize| s % m;
    let members: Vec<Vec<usize>> = (0..m).map(|g| (g..n).step_by(m).collect()).collect();
    let labels: Vec<u32> = (0..n).map(|s| u32::from(group_of(s) == 0)).collect();
    let base = spec.out_degree.floor() as usize;
    let frac = spec.out_degree - base as f64;
    let mut edges = Vec::with_capacity((n as f64 * spec.out_degree) as usize + n);
    for s in 0..n {
        let next = &members[(group_of(s) + 1) % m];
        let d = (base + usize::from(rng.gen_bool(frac))).min(next.len());
        for i in index::sample(&mut rng, next.len(), d) {
            edges.push((s, next[i]));
        }
    }
    KripkeStructure::from_label_ids(n, &edges, &labels)
}
