//! Partition-relation based simulation algorithms and their shared result
//! type.
//!
//! All three algorithms refine a [`PartitionRelationPair`] until, for all
//! blocks `B, C` with `C ∩ pre(B) ≠ ∅`, `∪Rel(C) ⊆ pre(∪Rel(B))`. Started
//! from the label partition with the identity relation, the final pair
//! encodes the simulation preorder: `(s, t)` is in the preorder iff
//! `(block(s), block(t))` is in the final relation.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::bitset::StateSet;
use crate::block_relation::PartitionRelationPair;
use crate::domains;
use crate::error::DomainError;
use crate::model::KripkeStructure;
use crate::reference::{self, Schedule};
use crate::relation::StateRelation;

pub mod basic;
mod ghost;
pub mod refined;
pub mod sa;

pub use basic::{basic_sa, basic_sa_with};
pub use refined::{refined_sa, refined_sa_with};
pub use sa::{sa, sa_with, RemoveInit, SaOptions};

/// Counters collected during a run. All are cheap and always on.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub outer_iterations: u64,
    /// Blocks generated by splits, counting both halves of every split block.
    pub blocks_created: u64,
    /// Total size of the remove sets consumed by selections.
    pub remove_volume: u64,
    pub rel_entries_cleared: u64,
    /// Rows/columns added to the block relation.
    pub matrix_insertions: u64,
    pub initial_blocks: u64,
    pub final_blocks: u64,
    /// Loop heads at which invariant checks ran.
    pub invariant_checks: u64,
    pub scan_skips: u64,
    pub tail_moves: u64,
    pub wall_time: Duration,
}

impl RunStats {
    /// Name/value pairs in a fixed order; wall time in microseconds.
    pub fn entries(&self) -> Vec<(&'static str, u64)> {
        vec![
            ("outer_iterations", self.outer_iterations),
            ("blocks_created", self.blocks_created),
            ("remove_volume", self.remove_volume),
            ("rel_entries_cleared", self.rel_entries_cleared),
            ("matrix_insertions", self.matrix_insertions),
            ("initial_blocks", self.initial_blocks),
            ("final_blocks", self.final_blocks),
            ("invariant_checks", self.invariant_checks),
            ("scan_skips", self.scan_skips),
            ("tail_moves", self.tail_moves),
            ("wall_time_us", self.wall_time.as_micros() as u64),
        ]
    }
}

/// Final partition and block relation of a simulation computation.
///
/// Blocks are sorted state lists ordered by least member; `relation[a]`
/// holds the indices of blocks `c` with `(a, c)` related, meaning states of
/// block `c` simulate states of block `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimResult {
    pub blocks: Vec<Vec<usize>>,
    pub block_of: Vec<usize>,
    pub relation: Vec<StateSet>,
    pub stats: RunStats,
}

impl SimResult {
    pub fn from_pair(pr: &PartitionRelationPair, stats: RunStats) -> Self {
        let canon = pr.canonical();
        let k = canon.blocks.len();
        let mut relation = vec![StateSet::new(k); k];
        for &(a, c) in &canon.relation {
            relation[a].insert(c);
        }
        Self::assemble(pr.num_states(), canon.blocks, relation, stats)
    }

    /// Quotients a preorder by its equivalence classes.
    pub fn from_preorder(rel: &StateRelation, stats: RunStats) -> Self {
        let blocks = rel.equivalence_classes();
        let k = blocks.len();
        let mut relation = vec![StateSet::new(k); k];
        let reps: Vec<usize> = blocks.iter().map(|b| b[0]).collect();
        for a in 0..k {
            for c in 0..k {
                if rel.contains(reps[a], reps[c]) {
                    relation[a].insert(c);
                }
            }
        }
        Self::assemble(rel.size(), blocks, relation, stats)
    }

    fn assemble(n: usize, blocks: Vec<Vec<usize>>, relation: Vec<StateSet>, mut stats: RunStats) -> Self {
        let mut block_of = vec![0; n];
        for (i, b) in blocks.iter().enumerate() {
            for &s in b {
                block_of[s] = i;
            }
        }
        stats.final_blocks = blocks.len() as u64;
        SimResult { blocks, block_of, relation, stats }
    }

    pub fn num_states(&self) -> usize {
        self.block_of.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn related(&self, a: usize, c: usize) -> bool {
        self.relation[a].contains(c)
    }

    /// `(a, c)` block index pairs in lexicographic order.
    pub fn relation_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.relation.iter().enumerate().flat_map(|(a, row)| row.iter().map(move |c| (a, c)))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.num_blocks()).all(|a| self.related(a, a))
    }

    pub fn is_transitive(&self) -> bool {
        self.relation_pairs().all(|(a, c)| self.relation[c].is_subset(&self.relation[a]))
    }

    /// The result as a partition-relation pair, block `i` with handle `i`.
    pub fn to_pair(&self) -> PartitionRelationPair {
        PartitionRelationPair::from_blocks(self.num_states(), &self.blocks, self.relation_pairs())
            .expect("result blocks partition the states")
    }

    /// Whether `other` describes the same partition and block relation,
    /// ignoring statistics.
    pub fn same_outcome(&self, other: &SimResult) -> bool {
        self.blocks == other.blocks && self.relation == other.relation
    }
}

/// `{(s, t) | (block(s), block(t)) ∈ Rel}`.
pub fn expand_preorder(res: &SimResult) -> StateRelation {
    let n = res.num_states();
    let block_sets: Vec<StateSet> = res.blocks.iter().map(|b| StateSet::from_states(n, b.iter().copied())).collect();
    let mut row_cache: HashMap<usize, StateSet> = HashMap::new();
    let rows = (0..n)
        .map(|s| {
            let a = res.block_of[s];
            row_cache
                .entry(a)
                .or_insert_with(|| {
                    let mut row = StateSet::new(n);
                    for c in res.relation[a].iter() {
                        row.union_with(&block_sets[c]);
                    }
                    row
                })
                .clone()
        })
        .collect();
    StateRelation::from_rows(rows)
}

/// Whether debug invariant checks run when the caller does not choose.
pub fn default_checks(num_states: usize) -> bool {
    cfg!(debug_assertions) && num_states <= ghost::GHOST_LIMIT
}

/// The algorithms this crate can run on a Kripke structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Sa,
    Basic,
    Refined,
    Hhk,
    Schematic,
    RefinedSimilarity,
    Oracle,
    Shell,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Sa,
        Algorithm::Basic,
        Algorithm::Refined,
        Algorithm::Hhk,
        Algorithm::Schematic,
        Algorithm::RefinedSimilarity,
        Algorithm::Oracle,
        Algorithm::Shell,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sa => "sa",
            Algorithm::Basic => "basic",
            Algorithm::Refined => "refined",
            Algorithm::Hhk => "hhk",
            Algorithm::Schematic => "schematic",
            Algorithm::RefinedSimilarity => "refined-hhk",
            Algorithm::Oracle => "oracle",
            Algorithm::Shell => "shell",
        }
    }

    /// Whether the algorithm honours a buggy flag.
    pub fn has_buggy_mode(self) -> bool {
        matches!(self, Algorithm::Hhk | Algorithm::RefinedSimilarity)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown algorithm `{0}`")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| UnknownAlgorithm(s.to_string()))
    }
}

/// Options shared by [`compute`].
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub buggy: bool,
    /// `None` picks [`default_checks`].
    pub check_invariants: Option<bool>,
    pub remove_init: RemoveInit,
    pub schedule: Schedule,
}

/// Runs `alg` from the label partition and returns its result in the
/// common form. Only the closure-based shell can fail, on inputs above its
/// size guard.
pub fn compute(ks: &KripkeStructure, alg: Algorithm, opts: &RunOptions) -> Result<SimResult, DomainError> {
    let start = std::time::Instant::now();
    let stamp = |mut r: SimResult| {
        r.stats.wall_time = start.elapsed();
        r
    };
    let ref_opts = reference::RefOptions {
        buggy: opts.buggy,
        schedule: opts.schedule,
        check_invariants: opts.check_invariants,
    };
    let initial_blocks = crate::partition::initial_partition(ks).num_blocks() as u64;
    let from_rel = |rel: StateRelation| {
        let stats = RunStats { initial_blocks, ..RunStats::default() };
        SimResult::from_preorder(&rel, stats)
    };
    Ok(match alg {
        Algorithm::Sa => {
            let sa_opts = SaOptions { init: opts.remove_init, check_invariants: opts.check_invariants };
            sa_with(ks, PartitionRelationPair::initial(ks), &sa_opts)
        }
        Algorithm::Basic => basic_sa_with(ks, PartitionRelationPair::initial(ks), opts.check_invariants),
        Algorithm::Refined => refined_sa_with(ks, PartitionRelationPair::initial(ks), opts.check_invariants),
        Algorithm::Hhk => stamp(from_rel(reference::sets_to_relation(reference::hhk_with(ks, &ref_opts)))),
        Algorithm::Schematic => {
            stamp(from_rel(reference::sets_to_relation(reference::schematic_similarity_with(ks, opts.schedule))))
        }
        Algorithm::RefinedSimilarity => {
            stamp(from_rel(reference::sets_to_relation(reference::refined_similarity_with(ks, &ref_opts))))
        }
        Algorithm::Oracle => stamp(from_rel(reference::naive_oracle(ks))),
        Algorithm::Shell => {
            let shell = domains::forward_shell(&domains::label_closure(ks)?, ks)?;
            stamp(from_rel(domains::preorder_from_closure(&shell)))
        }
    })
}
