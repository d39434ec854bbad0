//! Refinement loop that keeps, per block, the predecessor set `ppRel(B)`
//! seen at its last selection.
//!
//! A block is selected while `pre(∪Rel(B)) ≠ ppRel(B)`. The difference
//! `Remove = ppRel(B) ∖ pre(∪Rel(B))` decides which relation entries of the
//! blocks reaching `B` are dropped, instead of testing containment in
//! `pre(∪Rel(B))`.

use std::time::Instant;

use super::ghost::{self, Descent};
use super::{default_checks, RunStats, SimResult};
use crate::bitset::StateSet;
use crate::block_relation::PartitionRelationPair;
use crate::model::KripkeStructure;
use crate::partition::BlockId;

pub fn refined_sa(ks: &KripkeStructure, init: PartitionRelationPair) -> SimResult {
    refined_sa_with(ks, init, None)
}

pub fn refined_sa_with(ks: &KripkeStructure, init: PartitionRelationPair, check_invariants: Option<bool>) -> SimResult {
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
    // Indexed by block handle; handles only grow.
    let mut pp_rel: Vec<StateSet> = vec![StateSet::full(n); pr.partition.num_blocks()];

    loop {
        let Some((b, current)) = select(ks, &pr, &pp_rel) else { break };
        if checks {
            check_loop_head(ks, &pr, &pp_rel, &mut descent);
            stats.invariant_checks += 1;
        }
        stats.outer_iterations += 1;
        let remove = pp_rel[b.index()].difference(&current);
        stats.remove_volume += remove.len() as u64;
        pp_rel[b.index()] = current;
        let b_prev: Vec<u32> = pr.partition.states(b).to_vec();
        let splitter = pp_rel[b.index()].clone();
        let out = pr.split_set(&splitter);
        stats.blocks_created += 2 * out.new_blocks.len() as u64;
        for &(parent, child) in &out.new_blocks {
            debug_assert_eq!(child.index(), pp_rel.len());
            pp_rel.push(pp_rel[parent.index()].clone());
        }

        let mut hit = vec![false; pr.partition.num_blocks()];
        for &y in &b_prev {
            for &x in ks.predecessors(y as usize) {
                hit[pr.partition.block_of(x as usize).index()] = true;
            }
        }
        let all: Vec<BlockId> = pr.partition.scan_order().collect();
        for &c in all.iter().filter(|c| hit[c.index()]) {
            for &d in &all {
                if pr.rel.get(c, d) && pr.partition.states(d).iter().any(|&s| remove.contains(s as usize)) {
                    pr.rel.set(c, d, false);
                    stats.rel_entries_cleared += 1;
                }
            }
        }
    }
    if checks {
        check_loop_head(ks, &pr, &pp_rel, &mut descent);
        stats.invariant_checks += 1;
        for b in pr.partition.scan_order() {
            assert_eq!(ks.pre(&pr.union_rel(b)), pp_rel[b.index()], "exit condition");
        }
    }
    stats.matrix_insertions = (pr.rel.insertions() - base_insertions) as u64;
    let mut res = SimResult::from_pair(&pr, stats);
    res.stats.wall_time = start.elapsed();
    res
}

/// First block in scan order whose predecessor set moved, with the new set.
fn select(ks: &KripkeStructure, pr: &PartitionRelationPair, pp_rel: &[StateSet]) -> Option<(BlockId, StateSet)> {
    pr.partition.scan_order().find_map(|b| {
        let current = ks.pre(&pr.union_rel(b));
        (current != pp_rel[b.index()]).then_some((b, current))
    })
}

fn check_loop_head(ks: &KripkeStructure, pr: &PartitionRelationPair, pp_rel: &[StateSet], descent: &mut Descent) {
    assert!(pr.is_reflexive(), "block relation lost reflexivity");
    let blocks: Vec<BlockId> = pr.partition.scan_order().collect();
    let unions: Vec<StateSet> = blocks.iter().map(|&b| pr.union_rel(b)).collect();
    for (i, &b) in blocks.iter().enumerate() {
        // Inv1: pre(∪Rel(B)) ⊆ ppRel(B)
        assert!(ks.pre(&unions[i]).is_subset(&pp_rel[b.index()]), "Inv1 violated");
        let pre_b = ks.pre(&pr.partition.block_set(b));
        for (j, &c) in blocks.iter().enumerate() {
            // Inv2: C ∩ pre(B) ≠ ∅ ⇒ ∪Rel(C) ⊆ ppRel(B)
            if pr.partition.states(c).iter().any(|&s| pre_b.contains(s as usize)) {
                assert!(unions[j].is_subset(&pp_rel[b.index()]), "Inv2 violated");
            }
        }
    }
    let pending: usize = blocks
        .iter()
        .zip(&unions)
        .map(|(&b, u)| pp_rel[b.index()].difference(&ks.pre(u)).len())
        .sum();
    descent.step(blocks.len(), pr.state_pair_count(), pending);
}
