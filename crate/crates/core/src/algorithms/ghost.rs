//! Bitmask helpers for debug invariant checks on small inputs.

use crate::block_relation::PartitionRelationPair;
use crate::model::KripkeStructure;
use crate::partition::BlockId;

/// Largest state space on which ghost state is kept.
pub(crate) const GHOST_LIMIT: usize = 64;

pub(crate) struct Masks {
    pred: Vec<u64>,
    full: u64,
}

impl Masks {
    pub(crate) fn new(ks: &KripkeStructure) -> Self {
        let n = ks.num_states();
        assert!(n <= GHOST_LIMIT);
        let pred = (0..n).map(|y| mask_of(ks.predecessors(y).iter().map(|&x| x as usize))).collect();
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Masks { pred, full }
    }

    pub(crate) fn full(&self) -> u64 {
        self.full
    }

    pub(crate) fn pre(&self, mut m: u64) -> u64 {
        let mut out = 0;
        while m != 0 {
            let y = m.trailing_zeros() as usize;
            out |= self.pred[y];
            m &= m - 1;
        }
        out
    }
}

pub(crate) fn mask_of(states: impl IntoIterator<Item = usize>) -> u64 {
    states.into_iter().fold(0, |m, s| m | (1 << s))
}

pub(crate) fn block_mask(pr: &PartitionRelationPair, b: BlockId) -> u64 {
    mask_of(pr.partition.states(b).iter().map(|&s| s as usize))
}

/// `∪Rel(b)` as a mask.
pub(crate) fn union_rel_mask(pr: &PartitionRelationPair, b: BlockId) -> u64 {
    pr.partition
        .scan_order()
        .filter(|&c| pr.rel.get(b, c))
        .fold(0, |m, c| m | block_mask(pr, c))
}

/// Whether `m` is a union of blocks of the current partition.
pub(crate) fn is_union_of_blocks(pr: &PartitionRelationPair, m: u64) -> bool {
    pr.partition.scan_order().all(|b| {
        let bm = block_mask(pr, b);
        bm & m == 0 || bm & m == bm
    })
}

/// Tracks a lexicographic measure `(|P|, state pairs in Rel, pending work)`
/// that must strictly decrease, with `|P|` compared in reverse.
#[derive(Default)]
pub(crate) struct Descent {
    last: Option<(std::cmp::Reverse<usize>, usize, usize)>,
}

impl Descent {
    pub(crate) fn step(&mut self, blocks: usize, pairs: usize, pending: usize) {
        let now = (std::cmp::Reverse(blocks), pairs, pending);
        if let Some(prev) = self.last {
            assert!(now < prev, "no progress: measure went from {prev:?} to {now:?}");
        }
        self.last = Some(now);
    }
}
