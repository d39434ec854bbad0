//! Mutable state partition with contiguous block layout.
//!
//! States live in one array `order`; each block owns a contiguous segment
//! `[first, end)` of it, so moving a state between blocks is a swap plus an
//! index update. Blocks are arena handles that are never reused. A split
//! keeps the parent handle for `B ∖ S` and allocates a fresh child for
//! `B ∩ S`.
//!
//! Live blocks are also threaded on a doubly linked scan list. The
//! simulation driver walks it with [`Partition::next_selected`]; a block
//! whose remove set turns nonempty is moved to the tail so the cursor meets
//! it again.

use std::fmt::Write as _;

use crate::bitset::StateSet;
use crate::error::ModelError;
use crate::model::KripkeStructure;

/// Handle of a block in a [`Partition`] arena.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockId(u32);

impl BlockId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> Self {
        BlockId(i as u32)
    }
}

/// Append-only list of states. Each state is appended at most once, and
/// debug builds check that with a membership bitset.
#[derive(Clone, Debug, Default)]
pub struct RemoveSet {
    states: Vec<u32>,
    #[cfg(debug_assertions)]
    member: Option<StateSet>,
}

impl RemoveSet {
    fn push(&mut self, s: u32, _capacity: usize) {
        #[cfg(debug_assertions)]
        {
            let member = self.member.get_or_insert_with(|| StateSet::new(_capacity));
            assert!(member.insert(s as usize), "state {s} appended twice to a remove set");
        }
        self.states.push(s);
    }

    fn take(&mut self) -> Vec<u32> {
        #[cfg(debug_assertions)]
        {
            self.member = None;
        }
        std::mem::take(&mut self.states)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[derive(Clone, Debug)]
struct Block {
    first: u32,
    end: u32,
    /// States already moved to the front of the segment by the ongoing split.
    moved: u32,
    remove: RemoveSet,
    rel_count: Vec<u32>,
    prev: Option<BlockId>,
    next: Option<BlockId>,
}

/// `(parent, child)` pairs created by one split. The parent handle now
/// denotes `B ∖ S`, the child `B ∩ S`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SplitOutcome {
    pub new_blocks: Vec<(BlockId, BlockId)>,
}

impl SplitOutcome {
    pub fn is_empty(&self) -> bool {
        self.new_blocks.is_empty()
    }
}

/// Counters describing how the scan cursor moved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScanStats {
    /// Blocks passed over because their remove set was empty.
    pub skips: u64,
    /// Blocks relocated to the tail after their remove set became nonempty.
    pub tail_moves: u64,
}

#[derive(Clone, Debug)]
pub struct Partition {
    order: Vec<u32>,
    position: Vec<u32>,
    block_of: Vec<BlockId>,
    blocks: Vec<Block>,
    head: Option<BlockId>,
    tail: Option<BlockId>,
    cursor: Option<BlockId>,
    touched: Vec<BlockId>,
    scan: ScanStats,
}

impl Partition {
    /// The one-block partition `{Σ}`.
    pub fn single(num_states: usize) -> Self {
        Self::from_block_of(num_states, &vec![0; num_states]).expect("single block is valid")
    }

    /// Builds a partition from explicit blocks. Handles are assigned in the
    /// given order, which is also the initial scan order.
    pub fn from_blocks(num_states: usize, blocks: &[Vec<usize>]) -> Result<Self, ModelError> {
        let mut assignment = vec![u32::MAX; num_states];
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(ModelError::Inconsistent(format!("block {i} is empty")));
            }
            for &s in block {
                if s >= num_states {
                    return Err(ModelError::StateOutOfRange { state: s, num_states });
                }
                if assignment[s] != u32::MAX {
                    return Err(ModelError::Inconsistent(format!("state {s} in two blocks")));
                }
                assignment[s] = i as u32;
            }
        }
        if let Some(s) = assignment.iter().position(|&b| b == u32::MAX) {
            return Err(ModelError::Inconsistent(format!("state {s} in no block")));
        }
        Self::from_block_of(num_states, &assignment)
    }

    /// Builds a partition from a per-state block index; indices must be
    /// dense `0..k` with every index used.
    fn from_block_of(num_states: usize, assignment: &[u32]) -> Result<Self, ModelError> {
        let k = assignment.iter().map(|&b| b as usize + 1).max().unwrap_or(0);
        let mut sizes = vec![0u32; k];
        for &b in assignment {
            sizes[b as usize] += 1;
        }
        if sizes.contains(&0) {
            return Err(ModelError::Inconsistent("empty block index".into()));
        }
        let mut starts = vec![0u32; k + 1];
        for i in 0..k {
            starts[i + 1] = starts[i] + sizes[i];
        }
        let mut fill = starts.clone();
        let mut order = vec![0u32; num_states];
        let mut position = vec![0u32; num_states];
        for (s, &b) in assignment.iter().enumerate() {
            let p = fill[b as usize];
            order[p as usize] = s as u32;
            position[s] = p;
            fill[b as usize] += 1;
        }
        let blocks = (0..k)
            .map(|i| Block {
                first: starts[i],
                end: starts[i + 1],
                moved: 0,
                remove: RemoveSet::default(),
                rel_count: Vec::new(),
                prev: (i > 0).then(|| BlockId(i as u32 - 1)),
                next: (i + 1 < k).then(|| BlockId(i as u32 + 1)),
            })
            .collect();
        Ok(Partition {
            order,
            position,
            block_of: assignment.iter().map(|&b| BlockId(b)).collect(),
            blocks,
            head: (k > 0).then_some(BlockId(0)),
            tail: k.checked_sub(1).map(|t| BlockId(t as u32)),
            cursor: (k > 0).then_some(BlockId(0)),
            touched: Vec::new(),
            scan: ScanStats::default(),
        })
    }

    #[inline]
    pub fn num_states(&self) -> usize {
        self.order.len()
    }

    /// Number of live blocks. Handles are never freed, so this equals the
    /// arena size.
    #[inline]
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    #[inline]
    pub fn block_of(&self, s: usize) -> BlockId {
        self.block_of[s]
    }

    /// States of `b`, in layout order (not sorted).
    #[inline]
    pub fn states(&self, b: BlockId) -> &[u32] {
        let blk = &self.blocks[b.index()];
        &self.order[blk.first as usize..blk.end as usize]
    }

    #[inline]
    pub fn block_len(&self, b: BlockId) -> usize {
        let blk = &self.blocks[b.index()];
        (blk.end - blk.first) as usize
    }

    pub fn block_set(&self, b: BlockId) -> StateSet {
        StateSet::from_states(self.num_states(), self.states(b).iter().map(|&s| s as usize))
    }

    /// Live blocks in scan-list order.
    pub fn scan_order(&self) -> ScanIter<'_> {
        ScanIter { partition: self, next: self.head }
    }

    /// Blocks as sorted state lists, ordered by least member.
    pub fn to_blocks(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self
            .scan_order()
            .map(|b| {
                let mut v: Vec<usize> = self.states(b).iter().map(|&s| s as usize).collect();
                v.sort_unstable();
                v
            })
            .collect();
        out.sort();
        out
    }

    /// Whether `s` is a union of blocks.
    pub fn is_union_of_blocks(&self, s: &StateSet) -> bool {
        self.scan_order().all(|b| {
            let hits = self.states(b).iter().filter(|&&x| s.contains(x as usize)).count();
            hits == 0 || hits == self.block_len(b)
        })
    }

    /// Splits every block `B` into `B ∖ S` and `B ∩ S` when both are
    /// nonempty. `states` must be duplicate-free. Runs in `O(|S|)` plus the
    /// size of copied per-block data.
    ///
    /// A new child inherits the parent's remove set and relation counters;
    /// it is prepended to the scan list if the parent's remove set is empty
    /// and appended otherwise.
    pub fn split(&mut self, states: &[u32]) -> SplitOutcome {
        let mut touched = std::mem::take(&mut self.touched);
        for &s in states {
            let b = self.block_of[s as usize];
            let blk = &mut self.blocks[b.index()];
            if blk.moved == 0 {
                touched.push(b);
            }
            let target = blk.first + blk.moved;
            blk.moved += 1;
            let pos = self.position[s as usize];
            debug_assert!(pos >= target, "duplicate state {s} in splitter");
            let other = self.order[target as usize];
            self.order.swap(pos as usize, target as usize);
            self.position[other as usize] = pos;
            self.position[s as usize] = target;
        }

        let mut outcome = SplitOutcome::default();
        for &b in &touched {
            let child = BlockId(self.blocks.len() as u32);
            let blk = &mut self.blocks[b.index()];
            let moved = std::mem::replace(&mut blk.moved, 0);
            if moved == blk.end - blk.first {
                continue;
            }
            let first = blk.first;
            blk.first += moved;
            let child_block = Block {
                first,
                end: first + moved,
                moved: 0,
                remove: blk.remove.clone(),
                rel_count: blk.rel_count.clone(),
                prev: None,
                next: None,
            };
            let prepend = child_block.remove.is_empty();
            self.blocks.push(child_block);
            for i in first..first + moved {
                self.block_of[self.order[i as usize] as usize] = child;
            }
            if prepend {
                self.link_front(child);
            } else {
                self.link_back(child);
            }
            outcome.new_blocks.push((b, child));
        }
        touched.clear();
        self.touched = touched;
        outcome
    }

    pub fn split_set(&mut self, s: &StateSet) -> SplitOutcome {
        let states: Vec<u32> = s.iter().map(|x| x as u32).collect();
        self.split(&states)
    }

    fn link_front(&mut self, b: BlockId) {
        let old = self.head;
        {
            let blk = &mut self.blocks[b.index()];
            blk.prev = None;
            blk.next = old;
        }
        match old {
            Some(h) => self.blocks[h.index()].prev = Some(b),
            None => self.tail = Some(b),
        }
        self.head = Some(b);
    }

    fn link_back(&mut self, b: BlockId) {
        let old = self.tail;
        {
            let blk = &mut self.blocks[b.index()];
            blk.next = None;
            blk.prev = old;
        }
        match old {
            Some(t) => self.blocks[t.index()].next = Some(b),
            None => self.head = Some(b),
        }
        self.tail = Some(b);
    }

    fn unlink(&mut self, b: BlockId) {
        let (prev, next) = {
            let blk = &self.blocks[b.index()];
            (blk.prev, blk.next)
        };
        match prev {
            Some(p) => self.blocks[p.index()].next = next,
            None => self.head = next,
        }
        match next {
            Some(n) => self.blocks[n.index()].prev = prev,
            None => self.tail = prev,
        }
    }

    /// Moves `b` to the tail of the scan list. If the cursor sits on `b`
    /// it advances first, so blocks between `b` and the tail are not lost.
    pub fn mark_nonempty_remove(&mut self, b: BlockId) {
        if self.tail == Some(b) {
            return;
        }
        if self.cursor == Some(b) {
            self.cursor = self.blocks[b.index()].next;
        }
        self.unlink(b);
        self.link_back(b);
        self.scan.tail_moves += 1;
    }

    pub fn remove_set(&self, b: BlockId) -> &RemoveSet {
        &self.blocks[b.index()].remove
    }

    /// Replaces the remove set of `b` without touching the scan order.
    pub fn set_remove(&mut self, b: BlockId, states: impl IntoIterator<Item = u32>) {
        let cap = self.num_states();
        let blk = &mut self.blocks[b.index()];
        blk.remove.take();
        for s in states {
            blk.remove.push(s, cap);
        }
    }

    /// Appends `s` to the remove set of `b`, moving `b` to the tail when the
    /// set was empty before.
    pub fn push_remove(&mut self, b: BlockId, s: u32) {
        let cap = self.num_states();
        let blk = &mut self.blocks[b.index()];
        let was_empty = blk.remove.is_empty();
        blk.remove.push(s, cap);
        if was_empty {
            self.mark_nonempty_remove(b);
        }
    }

    pub fn take_remove(&mut self, b: BlockId) -> Vec<u32> {
        self.blocks[b.index()].remove.take()
    }

    /// Allocates a zeroed relation-count array on every block.
    pub fn reset_rel_counts(&mut self) {
        let n = self.num_states();
        for blk in &mut self.blocks {
            blk.rel_count.clear();
            blk.rel_count.resize(n, 0);
        }
    }

    #[inline]
    pub fn rel_count(&self, b: BlockId) -> &[u32] {
        &self.blocks[b.index()].rel_count
    }

    #[inline]
    pub fn rel_count_mut(&mut self, b: BlockId) -> &mut [u32] {
        &mut self.blocks[b.index()].rel_count
    }

    /// Points the scan cursor at the head of the scan list.
    pub fn reset_scan(&mut self) {
        self.cursor = self.head;
    }

    /// Advances the cursor to the first block with a nonempty remove set
    /// and returns it, leaving the cursor there.
    pub fn next_selected(&mut self) -> Option<BlockId> {
        while let Some(c) = self.cursor {
            if !self.blocks[c.index()].remove.is_empty() {
                return Some(c);
            }
            self.scan.skips += 1;
            self.cursor = self.blocks[c.index()].next;
        }
        None
    }

    pub fn scan_stats(&self) -> ScanStats {
        self.scan
    }

    /// `block <id>: s…` per live block in scan order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for b in self.scan_order() {
            let mut states: Vec<u32> = self.states(b).to_vec();
            states.sort_unstable();
            write!(out, "block {}:", b.index()).unwrap();
            for s in states {
                write!(out, " {s}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Checks the layout invariants: live segments tile the state array,
    /// `block_of` agrees with segments, positions invert `order`, and the
    /// scan list visits every block exactly once.
    pub fn check_consistency(&self) -> Result<(), String> {
        let n = self.num_states();
        for (i, &s) in self.order.iter().enumerate() {
            if self.position[s as usize] as usize != i {
                return Err(format!("position of state {s} is stale"));
            }
        }
        let mut covered = vec![false; n];
        let mut visited = 0;
        let mut prev = None;
        for b in self.scan_order() {
            visited += 1;
            if visited > self.blocks.len() {
                return Err("scan list has a cycle".into());
            }
            let blk = &self.blocks[b.index()];
            if blk.prev != prev {
                return Err(format!("back link of block {} is stale", b.index()));
            }
            prev = Some(b);
            if blk.first >= blk.end {
                return Err(format!("block {} is empty", b.index()));
            }
            for i in blk.first..blk.end {
                if covered[i as usize] {
                    return Err(format!("position {i} covered twice"));
                }
                covered[i as usize] = true;
                let s = self.order[i as usize];
                if self.block_of[s as usize] != b {
                    return Err(format!("block_of({s}) disagrees with segment of block {}", b.index()));
                }
            }
        }
        if visited != self.blocks.len() {
            return Err(format!("scan list holds {visited} of {} blocks", self.blocks.len()));
        }
        if self.tail != prev {
            return Err("tail pointer is stale".into());
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(format!("position {i} not covered"));
        }
        Ok(())
    }
}

pub struct ScanIter<'a> {
    partition: &'a Partition,
    next: Option<BlockId>,
}

impl Iterator for ScanIter<'_> {
    type Item = BlockId;

    fn next(&mut self) -> Option<BlockId> {
        let b = self.next?;
        self.next = self.partition.blocks[b.index()].next;
        Some(b)
    }
}

/// The label partition `P_ℓ`: one block per label class, blocks ordered by
/// their least state.
pub fn initial_partition(ks: &KripkeStructure) -> Partition {
    let mut remap = vec![u32::MAX; ks.num_label_classes()];
    let mut next = 0u32;
    let assignment: Vec<u32> = (0..ks.num_states())
        .map(|s| {
            let slot = &mut remap[ks.label(s) as usize];
            if *slot == u32::MAX {
                *slot = next;
                next += 1;
            }
            *slot
        })
        .collect();
    Partition::from_block_of(ks.num_states(), &assignment).expect("label classes form a partition")
}
