//! Relations on blocks and partition-relation pairs.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::bitset::StateSet;
use crate::error::ModelError;
use crate::model::KripkeStructure;
use crate::partition::{initial_partition, BlockId, Partition, SplitOutcome};

/// Resizable square boolean matrix indexed by block handles.
///
/// Rows are bit vectors; adding an entry appends one row and one column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockRelation {
    dim: usize,
    rows: Vec<Vec<u64>>,
    insertions: usize,
}

impl BlockRelation {
    pub fn new(dim: usize) -> Self {
        BlockRelation {
            dim,
            rows: vec![vec![0; dim.div_ceil(64)]; dim],
            insertions: 0,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut r = Self::new(dim);
        for i in 0..dim {
            r.set(BlockId::from_index(i), BlockId::from_index(i), true);
        }
        r
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Entries added by [`add_entry`](Self::add_entry) since construction.
    pub fn insertions(&self) -> usize {
        self.insertions
    }

    #[inline]
    pub fn get(&self, a: BlockId, b: BlockId) -> bool {
        let j = b.index();
        self.rows[a.index()][j / 64] & (1 << (j % 64)) != 0
    }

    #[inline]
    pub fn set(&mut self, a: BlockId, b: BlockId, value: bool) {
        let j = b.index();
        let word = &mut self.rows[a.index()][j / 64];
        if value {
            *word |= 1 << (j % 64);
        } else {
            *word &= !(1 << (j % 64));
        }
    }

    /// Adds a row and column for a block split off `parent`, copying the
    /// parent's row and column (and its diagonal cell). Returns the new
    /// index, which is the next block handle.
    pub fn add_entry(&mut self, parent: BlockId) -> BlockId {
        let child = BlockId::from_index(self.dim);
        let words = (self.dim + 1).div_ceil(64);
        if words > self.rows.first().map_or(0, Vec::len) {
            for row in &mut self.rows {
                row.push(0);
            }
        }
        let mut new_row = self.rows[parent.index()].clone();
        new_row.resize(words, 0);
        self.rows.push(new_row);
        self.dim += 1;
        for i in 0..self.dim {
            let a = BlockId::from_index(i);
            let v = self.get(a, parent);
            self.set(a, child, v);
        }
        self.insertions += 1;
        child
    }

    pub fn count(&self) -> usize {
        self.rows.iter().map(|r| r.iter().map(|w| w.count_ones() as usize).sum::<usize>()).sum()
    }

    /// Blocks `c` with `(a, c)` in the relation, by handle.
    pub fn row(&self, a: BlockId) -> impl Iterator<Item = BlockId> + '_ {
        (0..self.dim).map(BlockId::from_index).filter(move |&c| self.get(a, c))
    }
}

/// Canonical form of a pair: blocks sorted by least member, relation as
/// index pairs into that order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalPair {
    pub blocks: Vec<Vec<usize>>,
    pub relation: BTreeSet<(usize, usize)>,
}

/// A partition together with a relation on its blocks. `(B, C)` in the
/// relation means the states of `C` are candidate simulators of those of
/// `B`.
#[derive(Clone, Debug)]
pub struct PartitionRelationPair {
    pub partition: Partition,
    pub rel: BlockRelation,
}

impl PartitionRelationPair {
    /// `⟨P_ℓ, id⟩`.
    pub fn initial(ks: &KripkeStructure) -> Self {
        let partition = initial_partition(ks);
        let rel = BlockRelation::identity(partition.num_blocks());
        PartitionRelationPair { partition, rel }
    }

    /// Builds a pair from explicit blocks and block-index pairs.
    pub fn from_blocks(
        num_states: usize,
        blocks: &[Vec<usize>],
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, ModelError> {
        let partition = Partition::from_blocks(num_states, blocks)?;
        let mut rel = BlockRelation::new(blocks.len());
        for (a, b) in pairs {
            if a >= blocks.len() || b >= blocks.len() {
                return Err(ModelError::Inconsistent(format!("relation pair ({a}, {b}) names a missing block")));
            }
            rel.set(BlockId::from_index(a), BlockId::from_index(b), true);
        }
        Ok(PartitionRelationPair { partition, rel })
    }

    pub fn num_states(&self) -> usize {
        self.partition.num_states()
    }

    /// `Rel(b)` in scan order.
    pub fn rel_blocks(&self, b: BlockId) -> Vec<BlockId> {
        self.partition.scan_order().filter(|&c| self.rel.get(b, c)).collect()
    }

    /// `∪Rel(b)`.
    pub fn union_rel(&self, b: BlockId) -> StateSet {
        let mut out = StateSet::new(self.num_states());
        for c in self.partition.scan_order().filter(|&c| self.rel.get(b, c)) {
            for &s in self.partition.states(c) {
                out.insert(s as usize);
            }
        }
        out
    }

    /// Splits the partition by `states` and gives every new block a copy of
    /// its parent's relation row and column.
    pub fn split(&mut self, states: &[u32]) -> SplitOutcome {
        let outcome = self.partition.split(states);
        for &(parent, child) in &outcome.new_blocks {
            let added = self.rel.add_entry(parent);
            debug_assert_eq!(added, child);
        }
        outcome
    }

    pub fn split_set(&mut self, s: &StateSet) -> SplitOutcome {
        let states: Vec<u32> = s.iter().map(|x| x as u32).collect();
        self.split(&states)
    }

    pub fn is_reflexive(&self) -> bool {
        self.partition.scan_order().all(|b| self.rel.get(b, b))
    }

    pub fn is_transitive(&self) -> bool {
        let blocks: Vec<BlockId> = self.partition.scan_order().collect();
        blocks.iter().all(|&a| {
            blocks.iter().filter(|&&b| self.rel.get(a, b)).all(|&b| {
                blocks.iter().filter(|&&c| self.rel.get(b, c)).all(|&c| self.rel.get(a, c))
            })
        })
    }

    /// Number of state pairs `(s, t)` covered by the relation.
    pub fn state_pair_count(&self) -> usize {
        let blocks: Vec<BlockId> = self.partition.scan_order().collect();
        let mut total = 0;
        for &a in &blocks {
            let width: usize = blocks.iter().filter(|&&c| self.rel.get(a, c)).map(|&c| self.partition.block_len(c)).sum();
            total += self.partition.block_len(a) * width;
        }
        total
    }

    pub fn canonical(&self) -> CanonicalPair {
        let mut handles: Vec<(Vec<usize>, BlockId)> = self
            .partition
            .scan_order()
            .map(|b| {
                let mut v: Vec<usize> = self.partition.states(b).iter().map(|&s| s as usize).collect();
                v.sort_unstable();
                (v, b)
            })
            .collect();
        handles.sort();
        let index: HashMap<BlockId, usize> = handles.iter().enumerate().map(|(i, (_, b))| (*b, i)).collect();
        let mut relation = BTreeSet::new();
        for (_, a) in &handles {
            for (_, c) in &handles {
                if self.rel.get(*a, *c) {
                    relation.insert((index[a], index[c]));
                }
            }
        }
        CanonicalPair { blocks: handles.into_iter().map(|(v, _)| v).collect(), relation }
    }

    /// Block dump followed by `rel <a> <b>` per true cell, both in scan order.
    pub fn dump(&self) -> String {
        let mut out = self.partition.dump();
        for a in self.partition.scan_order() {
            for c in self.partition.scan_order() {
                if self.rel.get(a, c) {
                    writeln!(out, "rel {} {}", a.index(), c.index()).unwrap();
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(i: usize) -> BlockId {
        BlockId::from_index(i)
    }

    /// Σ = {1,2,3,4} as 0..3, P = {12, 3, 4}, R = {(12,3), (3,4), (4,3)} ∪ id.
    fn simplebis() -> PartitionRelationPair {
        PartitionRelationPair::from_blocks(
            4,
            &[vec![0, 1], vec![2], vec![3]],
            [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (2, 1)],
        )
        .unwrap()
    }

    #[test]
    fn rel_blocks_identity() {
        let ks = KripkeStructure::from_label_ids(4, &[], &[0, 0, 0, 1]).unwrap();
        let pr = PartitionRelationPair::initial(&ks);
        assert_eq!(pr.rel_blocks(b(0)), vec![b(0)]);
        assert_eq!(pr.union_rel(b(0)), StateSet::from_states(4, [0, 1, 2]));
    }

    #[test]
    fn rel_blocks_simplebis() {
        let mut pr = simplebis();
        assert_eq!(pr.rel_blocks(b(1)), vec![b(1), b(2)]);
        assert_eq!(pr.union_rel(b(1)), StateSet::from_states(4, [2, 3]));
        pr.rel.set(b(1), b(2), false);
        assert_eq!(pr.rel_blocks(b(1)), vec![b(1)]);
    }

    #[test]
    fn union_rel_closes_over_stored_relation() {
        // The stored relation is not transitive, so ∪Rel({1,2}) = {1,2,3};
        // adding the transitive pair gives the R* image {1,2,3,4}.
        let mut pr = simplebis();
        assert_eq!(pr.union_rel(b(0)), StateSet::from_states(4, [0, 1, 2]));
        pr.rel.set(b(0), b(2), true);
        assert_eq!(pr.union_rel(b(0)), StateSet::full(4));
    }

    #[test]
    fn add_entry_grows_one_by_one() {
        let mut r = BlockRelation::identity(1);
        let c = r.add_entry(b(0));
        assert_eq!(c, b(1));
        assert_eq!(r.dimension(), 2);
        assert!(r.get(b(0), b(0)) && r.get(b(0), b(1)) && r.get(b(1), b(0)) && r.get(b(1), b(1)));
        assert_eq!(r.insertions(), 1);
    }

    #[test]
    fn add_entry_crosses_word_boundary() {
        let mut r = BlockRelation::identity(63);
        r.set(b(5), b(62), true);
        let c = r.add_entry(b(62));
        let d = r.add_entry(b(5));
        assert_eq!((c, d), (b(63), b(64)));
        assert!(r.get(b(5), b(63)) && r.get(b(63), b(63)) && r.get(b(64), b(62)) && r.get(b(64), b(63)));
        assert!(!r.get(b(63), b(5)));
    }

    #[test]
    fn dump_lists_true_cells() {
        let pr = simplebis();
        let dump = pr.dump();
        assert!(dump.starts_with("block 0: 0 1\nblock 1: 2\nblock 2: 3\n"));
        assert!(dump.contains("rel 0 1\n") && dump.contains("rel 2 1\n"));
        assert_eq!(dump.lines().filter(|l| l.starts_with("rel")).count(), 6);
    }

    proptest! {
        /// After a split, every cell equals the cell of the parents before it.
        #[test]
        fn split_copies_parent_cells(
            labels in proptest::collection::vec(0usize..3, 1..16),
            cells in proptest::collection::vec(any::<bool>(), 9),
            splitter in proptest::collection::vec(any::<bool>(), 16),
        ) {
            let n = labels.len();
            let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); 3];
            for (s, &l) in labels.iter().enumerate() {
                blocks[l].push(s);
            }
            let blocks: Vec<Vec<usize>> = blocks.into_iter().filter(|b| !b.is_empty()).collect();
            let k = blocks.len();
            let pairs: Vec<(usize, usize)> = (0..k)
                .flat_map(|a| (0..k).map(move |c| (a, c)))
                .filter(|&(a, c)| a == c || cells[a * 3 + c])
                .collect();
            let mut pr = PartitionRelationPair::from_blocks(n, &blocks, pairs).unwrap();
            let before = pr.clone();
            let s = StateSet::from_states(n, (0..n).filter(|&i| splitter[i]));
            let out = pr.split_set(&s);
            let parent = |x: BlockId| {
                out.new_blocks.iter().find(|&&(_, c)| c == x).map_or(x, |&(p, _)| p)
            };
            for x in pr.partition.scan_order() {
                for y in pr.partition.scan_order() {
                    prop_assert_eq!(pr.rel.get(x, y), before.rel.get(parent(x), parent(y)));
                }
            }
            prop_assert_eq!(pr.rel.insertions(), out.new_blocks.len());
        }
    }
}
