//! The efficient simulation algorithm.
//!
//! Every block carries a remove set and a relation counter
//! `RelCount(x) = |{x → y | y ∈ ∪Rel(B)}|`. Selecting a block consumes its
//! remove set, splits the partition by it, and for every block `C` reaching
//! the selected block drops from `Rel(C)` the blocks inside the remove set.
//! Counters that fall to zero feed new remove sets.

use std::time::Instant;

use super::ghost::{self, Descent, Masks};
use super::{default_checks, RunStats, SimResult};
use crate::block_relation::PartitionRelationPair;
use crate::model::KripkeStructure;
use crate::partition::BlockId;

/// How the remove set of each block is initialised.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RemoveInit {
    /// `Σ ∖ pre(∪Rel(B))`. Sound on every structure.
    #[default]
    AllStates,
    /// `pre(Σ) ∖ pre(∪Rel(B))`. Agrees with [`RemoveInit::AllStates`] on
    /// total structures but can keep a sink as a simulator of a state with
    /// successors otherwise.
    Predecessors,
}

#[derive(Clone, Debug, Default)]
pub struct SaOptions {
    pub init: RemoveInit,
    /// `None` picks [`default_checks`].
    pub check_invariants: Option<bool>,
}

pub fn sa(ks: &KripkeStructure, init: PartitionRelationPair) -> SimResult {
    sa_with(ks, init, &SaOptions::default())
}

pub fn sa_with(ks: &KripkeStructure, init: PartitionRelationPair, opts: &SaOptions) -> SimResult {
    let start = Instant::now();
    let n = ks.num_states();
    let mut pr = init;
    // The predecessor-based initialisation does not maintain the loop
    // invariants, so it runs unchecked like the buggy reference modes.
    let checks = opts.init == RemoveInit::AllStates
        && opts.check_invariants.unwrap_or_else(|| default_checks(n))
        && n <= ghost::GHOST_LIMIT;
    let mut ghost = checks.then(|| Ghost::new(ks, &pr));
    let mut stats = RunStats {
        initial_blocks: pr.partition.num_blocks() as u64,
        ..RunStats::default()
    };
    let base_insertions = pr.rel.insertions();

    initialize(ks, &mut pr, opts.init);

    // Epoch marks indexed by block handle, for the remove list and for the
    // blocks reaching the selected one.
    let mut list_mark: Vec<u64> = Vec::new();
    let mut hit_mark: Vec<u64> = Vec::new();
    let mut epoch = 0u64;
    let mut remove_list: Vec<BlockId> = Vec::new();
    let mut hit: Vec<BlockId> = Vec::new();
    let mut scratch: Vec<u32> = Vec::new();

    pr.partition.reset_scan();
    while let Some(b) = pr.partition.next_selected() {
        if let Some(g) = ghost.as_mut() {
            g.check(&pr);
            g.select(&pr, b);
            stats.invariant_checks += 1;
        }
        stats.outer_iterations += 1;
        let remove = pr.partition.take_remove(b);
        stats.remove_volume += remove.len() as u64;
        let b_prev: Vec<u32> = pr.partition.states(b).to_vec();

        let out = pr.split(&remove);
        stats.blocks_created += 2 * out.new_blocks.len() as u64;
        if let Some(g) = ghost.as_mut() {
            g.split(&out.new_blocks);
        }

        epoch += 1;
        let nb = pr.partition.num_blocks();
        list_mark.resize(nb, 0);
        hit_mark.resize(nb, 0);

        remove_list.clear();
        let mut covered = 0;
        for &s in &remove {
            let d = pr.partition.block_of(s as usize);
            if list_mark[d.index()] != epoch {
                list_mark[d.index()] = epoch;
                covered += pr.partition.block_len(d);
                remove_list.push(d);
            }
        }
        assert_eq!(covered, remove.len(), "remove set is not a union of blocks after splitting");

        hit.clear();
        for &y in &b_prev {
            for &x in ks.predecessors(y as usize) {
                let c = pr.partition.block_of(x as usize);
                if hit_mark[c.index()] != epoch {
                    hit_mark[c.index()] = epoch;
                    hit.push(c);
                }
            }
        }

        for &c in &hit {
            for &d in &remove_list {
                if !pr.rel.get(c, d) {
                    continue;
                }
                pr.rel.set(c, d, false);
                stats.rel_entries_cleared += 1;
                scratch.clear();
                scratch.extend_from_slice(pr.partition.states(d));
                for &s in &scratch {
                    for &x in ks.predecessors(s as usize) {
                        let count = &mut pr.partition.rel_count_mut(c)[x as usize];
                        *count -= 1;
                        if *count == 0 {
                            pr.partition.push_remove(c, x);
                        }
                    }
                }
            }
        }
    }
    if let Some(g) = ghost.as_mut() {
        g.check(&pr);
        stats.invariant_checks += 1;
    }

    let scan = pr.partition.scan_stats();
    stats.scan_skips = scan.skips;
    stats.tail_moves = scan.tail_moves;
    stats.matrix_insertions = (pr.rel.insertions() - base_insertions) as u64;
    let mut res = SimResult::from_pair(&pr, stats);
    res.stats.wall_time = start.elapsed();
    res
}

/// Computes relation counters and initial remove sets.
fn initialize(ks: &KripkeStructure, pr: &mut PartitionRelationPair, mode: RemoveInit) {
    let n = ks.num_states();
    pr.partition.reset_rel_counts();
    let blocks: Vec<BlockId> = pr.partition.scan_order().collect();
    for &b in &blocks {
        let related_to_b: Vec<BlockId> = blocks.iter().copied().filter(|&c| pr.rel.get(c, b)).collect();
        let members: Vec<u32> = pr.partition.states(b).to_vec();
        for &y in &members {
            for &x in ks.predecessors(y as usize) {
                for &c in &related_to_b {
                    pr.partition.rel_count_mut(c)[x as usize] += 1;
                }
            }
        }
    }
    for &b in &blocks {
        let initial: Vec<u32> = (0..n)
            .filter(|&x| pr.partition.rel_count(b)[x] == 0)
            .filter(|&x| mode == RemoveInit::AllStates || ks.out_degree(x) > 0)
            .map(|x| x as u32)
            .collect();
        pr.partition.set_remove(b, initial);
    }
}

/// Shadow state for invariant checks: the logical `ppRel` of every block
/// and the history of consumed remove sets.
struct Ghost {
    masks: Masks,
    pp_rel: Vec<u64>,
    selections: Vec<(u64, u64)>,
    descent: Descent,
    succ_count: Vec<Vec<u32>>,
}

impl Ghost {
    fn new(ks: &KripkeStructure, pr: &PartitionRelationPair) -> Self {
        let masks = Masks::new(ks);
        let n = ks.num_states();
        let succ_count = (0..n)
            .map(|x| {
                let mut v = vec![0u32; n];
                for &y in ks.successors(x) {
                    v[y as usize] += 1;
                }
                v
            })
            .collect();
        Ghost {
            pp_rel: vec![masks.full(); pr.partition.num_blocks()],
            masks,
            selections: Vec::new(),
            descent: Descent::default(),
            succ_count,
        }
    }

    fn check(&mut self, pr: &PartitionRelationPair) {
        assert!(pr.is_reflexive(), "block relation lost reflexivity");
        let n = pr.num_states();
        let mut pending = 0;
        for c in pr.partition.scan_order() {
            let union = ghost::union_rel_mask(pr, c);
            let remove = ghost::mask_of(pr.partition.remove_set(c).as_slice().iter().map(|&s| s as usize));
            let expected = self.pp_rel[c.index()] & !self.masks.pre(union);
            pending += remove.count_ones() as usize;
            assert_eq!(remove, expected, "Inv3 violated at block {}", c.index());
            // Inv4
            assert!(ghost::is_union_of_blocks(pr, self.pp_rel[c.index()]), "Inv4 violated");
            for x in 0..n {
                let expected: u32 = (0..n)
                    .filter(|&y| union & (1 << y) != 0)
                    .map(|y| self.succ_count[x][y])
                    .sum();
                assert_eq!(pr.partition.rel_count(c)[x], expected, "stale relation counter");
            }
        }
        self.descent.step(pr.partition.num_blocks(), pr.state_pair_count(), pending);
    }

    fn select(&mut self, pr: &PartitionRelationPair, b: BlockId) {
        let members = ghost::block_mask(pr, b);
        let remove = ghost::mask_of(pr.partition.remove_set(b).as_slice().iter().map(|&s| s as usize));
        for &(earlier_members, earlier_remove) in &self.selections {
            if members & !earlier_members == 0 {
                assert_eq!(earlier_remove & remove, 0, "remove sets of nested selections overlap");
            }
        }
        self.selections.push((members, remove));
        self.pp_rel[b.index()] = self.masks.pre(ghost::union_rel_mask(pr, b));
    }

    fn split(&mut self, new_blocks: &[(BlockId, BlockId)]) {
        for &(parent, child) in new_blocks {
            debug_assert_eq!(child.index(), self.pp_rel.len());
            self.pp_rel.push(self.pp_rel[parent.index()]);
        }
    }
}
