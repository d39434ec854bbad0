//! The basic partition-relation refinement loop.
//!
//! Each iteration looks for blocks `B, C` with `C ∩ pre(B) ≠ ∅` and
//! `∪Rel(C) ⊄ pre(∪Rel(B))`, splits by `S = pre(∪Rel(B))` and removes from
//! the rows of the blocks reaching `B` every block outside `S`. Witnesses
//! are recomputed from scratch, so this is meant for small inputs and as a
//! cross-check.

use std::time::Instant;

use super::ghost::{self, Descent};
use super::{default_checks, RunStats, SimResult};
use crate::bitset::StateSet;
use crate::block_relation::PartitionRelationPair;
use crate::model::KripkeStructure;
use crate::partition::BlockId;

pub fn basic_sa(ks: &KripkeStructure, init: PartitionRelationPair) -> SimResult {
    basic_sa_with(ks, init, None)
}

pub fn basic_sa_with(ks: &KripkeStructure, init: PartitionRelationPair, check_invariants: Option<bool>) -> SimResult {
    let start = Instant::now();
    let n = ks.num_states();
    let mut pr = init;
    let checks = check_invariants.unwrap_or_else(|| default_checks(n)) && n <= ghost::GHOST_LIMIT;
    let mut descent = Descent::default();
    let mut stats = RunStats {
        initial_blocks: pr.partition.num_blocks() as u64,
        ..RunStats::default()
    };
    let base_insertions = pr.rel.insertions();

    while let Some((b, s)) = find_witness(ks, &pr) {
        if checks {
            check_loop_head(&pr, &mut descent);
            stats.invariant_checks += 1;
        }
        stats.outer_iterations += 1;
        let b_prev: Vec<u32> = pr.partition.states(b).to_vec();
        let out = pr.split_set(&s);
        stats.blocks_created += 2 * out.new_blocks.len() as u64;

        let mut pre_b = StateSet::new(n);
        for &y in &b_prev {
            for &x in ks.predecessors(y as usize) {
                pre_b.insert(x as usize);
            }
        }
        let hit = blocks_meeting(&pr, &pre_b);
        let all: Vec<BlockId> = pr.partition.scan_order().collect();
        for &c in &hit {
            for &d in &all {
                // After the split every block is inside S or disjoint from it.
                if pr.rel.get(c, d) && !s.contains(pr.partition.states(d)[0] as usize) {
                    pr.rel.set(c, d, false);
                    stats.rel_entries_cleared += 1;
                }
            }
        }
    }
    if checks {
        check_loop_head(&pr, &mut descent);
        stats.invariant_checks += 1;
    }
    stats.matrix_insertions = (pr.rel.insertions() - base_insertions) as u64;
    let mut res = SimResult::from_pair(&pr, stats);
    res.stats.wall_time = start.elapsed();
    res
}

/// Distinct blocks holding some state of `set`.
fn blocks_meeting(pr: &PartitionRelationPair, set: &StateSet) -> Vec<BlockId> {
    let mut seen = vec![false; pr.partition.num_blocks()];
    let mut out = Vec::new();
    for s in set.iter() {
        let c = pr.partition.block_of(s);
        if !seen[c.index()] {
            seen[c.index()] = true;
            out.push(c);
        }
    }
    out
}

/// First block `B` in scan order violating the stability condition,
/// together with `pre(∪Rel(B))`.
fn find_witness(ks: &KripkeStructure, pr: &PartitionRelationPair) -> Option<(BlockId, StateSet)> {
    let unions: Vec<(BlockId, StateSet)> = pr.partition.scan_order().map(|b| (b, pr.union_rel(b))).collect();
    let union_of = |b: BlockId| &unions.iter().find(|(x, _)| *x == b).expect("live block").1;
    for (b, u) in &unions {
        let s = ks.pre(u);
        let pre_b = ks.pre(&pr.partition.block_set(*b));
        for c in blocks_meeting(pr, &pre_b) {
            if !union_of(c).is_subset(&s) {
                return Some((*b, s));
            }
        }
    }
    None
}

fn check_loop_head(pr: &PartitionRelationPair, descent: &mut Descent) {
    assert!(pr.is_reflexive(), "block relation lost reflexivity");
    pr.partition.check_consistency().expect("partition layout");
    descent.step(pr.partition.num_blocks(), pr.state_pair_count(), 0);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_input_is_unchanged() {
        // Single label, complete graph: the identity pair is already stable.
        let n = 3;
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        let ks = KripkeStructure::from_label_ids(n, &edges, &[0; 3]).unwrap();
        let res = basic_sa(&ks, PartitionRelationPair::initial(&ks));
        assert_eq!(res.blocks, vec![vec![0, 1, 2]]);
        assert_eq!(res.stats.outer_iterations, 0);
    }
}
