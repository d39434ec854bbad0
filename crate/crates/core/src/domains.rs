//! Closure operators on the powerset of states, represented by their
//! images (Moore families).
//!
//! This is oracle-side machinery: families can be exponentially large, so
//! every constructor refuses state spaces above [`MAX_STATES`].

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use crate::bitset::StateSet;
use crate::block_relation::PartitionRelationPair;
use crate::error::DomainError;
use crate::model::KripkeStructure;
use crate::partition::BlockId;
use crate::relation::StateRelation;

/// Largest state space accepted by the closure constructors.
pub const MAX_STATES: usize = 16;

/// An intersection-closed family of state sets containing the universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureFamily {
    universe: usize,
    /// Sorted and deduplicated.
    sets: Vec<StateSet>,
}

impl ClosureFamily {
    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn sets(&self) -> &[StateSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, x: &StateSet) -> bool {
        self.sets.binary_search(x).is_ok()
    }

    pub fn is_intersection_closed(&self) -> bool {
        self.contains(&StateSet::full(self.universe))
            && self
                .sets
                .iter()
                .all(|a| self.sets.iter().all(|b| self.contains(&a.intersection(b))))
    }

    /// Closed under binary unions and containing `∅`.
    pub fn is_union_closed(&self) -> bool {
        self.contains(&StateSet::new(self.universe))
            && self.sets.iter().all(|a| self.sets.iter().all(|b| self.contains(&a.union(b))))
    }

    /// Whether `pre(X)` belongs to the family for every member `X`.
    pub fn is_pre_closed(&self, ks: &KripkeStructure) -> bool {
        self.sets.iter().all(|x| self.contains(&ks.pre(x)))
    }

    /// One member per line as sorted indices.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for s in &self.sets {
            writeln!(out, "{s}").unwrap();
        }
        out
    }

    fn from_set(universe: usize, sets: HashSet<StateSet>) -> Self {
        let mut sets: Vec<StateSet> = sets.into_iter().collect();
        sets.sort();
        ClosureFamily { universe, sets }
    }
}

fn guard(universe: usize) -> Result<(), DomainError> {
    if universe > MAX_STATES {
        return Err(DomainError::TooLarge { size: universe, limit: MAX_STATES });
    }
    Ok(())
}

fn check_capacity(universe: usize, x: &StateSet) -> Result<(), DomainError> {
    if x.capacity() != universe {
        return Err(DomainError::CapacityMismatch { family: universe, argument: x.capacity() });
    }
    Ok(())
}

/// Closes `seed` under a binary operation with a worklist of pairwise
/// combinations.
fn close_under(seed: impl IntoIterator<Item = StateSet>, op: impl Fn(&StateSet, &StateSet) -> StateSet) -> HashSet<StateSet> {
    let mut all: Vec<StateSet> = Vec::new();
    let mut seen: HashSet<StateSet> = HashSet::new();
    let mut queue: Vec<StateSet> = Vec::new();
    for s in seed {
        if seen.insert(s.clone()) {
            queue.push(s);
        }
    }
    while let Some(x) = queue.pop() {
        for y in &all {
            let z = op(&x, y);
            if !seen.contains(&z) {
                seen.insert(z.clone());
                queue.push(z);
            }
        }
        all.push(x);
    }
    seen
}

/// The least member of `cf` containing `x`.
pub fn apply(cf: &ClosureFamily, x: &StateSet) -> Result<StateSet, DomainError> {
    check_capacity(cf.universe, x)?;
    let mut out = StateSet::full(cf.universe);
    for f in cf.sets.iter().filter(|f| x.is_subset(f)) {
        out.intersect_with(f);
    }
    Ok(out)
}

/// The smallest intersection-closed family containing `sets` and `Σ`.
pub fn moore_closure(universe: usize, sets: impl IntoIterator<Item = StateSet>) -> Result<ClosureFamily, DomainError> {
    guard(universe)?;
    let mut seed = vec![StateSet::full(universe)];
    for s in sets {
        check_capacity(universe, &s)?;
        seed.push(s);
    }
    Ok(ClosureFamily::from_set(universe, close_under(seed, StateSet::intersection)))
}

/// Closure of the image under arbitrary unions, `∅` included.
pub fn disjunctive_completion(cf: &ClosureFamily) -> ClosureFamily {
    let seed = cf.sets.iter().cloned().chain([StateSet::new(cf.universe)]);
    ClosureFamily::from_set(cf.universe, close_under(seed, StateSet::union))
}

/// Groups states by the closure of their singleton, ordered by least member.
pub fn induced_partition(cf: &ClosureFamily) -> Vec<StateSet> {
    let n = cf.universe;
    let images: Vec<StateSet> = (0..n)
        .map(|s| apply(cf, &StateSet::from_states(n, [s])).expect("capacity matches"))
        .collect();
    let mut blocks: Vec<StateSet> = Vec::new();
    let mut done = vec![false; n];
    for s in 0..n {
        if done[s] {
            continue;
        }
        let block = StateSet::from_states(n, (s..n).filter(|&t| images[t] == images[s]));
        for t in block.iter() {
            done[t] = true;
        }
        blocks.push(block);
    }
    blocks
}

/// `Cl∩` of the label classes.
pub fn label_closure(ks: &KripkeStructure) -> Result<ClosureFamily, DomainError> {
    let n = ks.num_states();
    guard(n)?;
    let classes: BTreeSet<StateSet> = (0..n).map(|s| ks.label_block(s)).collect();
    moore_closure(n, classes)
}

/// The most abstract refinement of `cf` closed under `pre` and unions.
///
/// Iterates `ρ ↦ Cl∩(ρ ∪ pre(ρ))` from `cf` to stabilisation, then takes the
/// disjunctive completion of the result.
pub fn forward_shell(cf: &ClosureFamily, ks: &KripkeStructure) -> Result<ClosureFamily, DomainError> {
    let n = ks.num_states();
    guard(n)?;
    if cf.universe != n {
        return Err(DomainError::CapacityMismatch { family: cf.universe, argument: n });
    }
    Ok(disjunctive_completion(&pre_shell_trace(cf, ks).pop().expect("trace is nonempty")))
}

/// The iterates of the pre-closure loop, starting with `cf` itself and
/// ending at the fixpoint (which appears once).
pub fn pre_shell_trace(cf: &ClosureFamily, ks: &KripkeStructure) -> Vec<ClosureFamily> {
    let mut trace = vec![cf.clone()];
    loop {
        let current = trace.last().expect("nonempty");
        let extended = current.sets.iter().cloned().chain(current.sets.iter().map(|x| ks.pre(x)));
        let next = moore_closure(cf.universe, extended).expect("guard already checked");
        if &next == current {
            return trace;
        }
        trace.push(next);
    }
}

/// `{(s, t) | t ∈ apply(cf, {s})}`.
pub fn preorder_from_closure(cf: &ClosureFamily) -> StateRelation {
    let n = cf.universe;
    let rows = (0..n)
        .map(|s| apply(cf, &StateSet::from_states(n, [s])).expect("capacity matches"))
        .collect();
    StateRelation::from_rows(rows)
}

/// The disjunctive closure whose singleton images are `∪R*(block(s))`,
/// with `R*` the reflexive-transitive closure of the block relation.
pub fn closure_of_pair(pr: &PartitionRelationPair) -> Result<ClosureFamily, DomainError> {
    let n = pr.num_states();
    guard(n)?;
    let blocks: Vec<BlockId> = pr.partition.scan_order().collect();
    let block_sets: Vec<StateSet> = blocks.iter().map(|&b| pr.partition.block_set(b)).collect();
    let k = blocks.len();
    let mut reach: Vec<Vec<bool>> = (0..k)
        .map(|i| (0..k).map(|j| i == j || pr.rel.get(blocks[i], blocks[j])).collect())
        .collect();
    for m in 0..k {
        for i in 0..k {
            if reach[i][m] {
                for j in 0..k {
                    if reach[m][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let images: Vec<StateSet> = (0..k)
        .map(|i| {
            let mut img = StateSet::new(n);
            for j in (0..k).filter(|&j| reach[i][j]) {
                img.union_with(&block_sets[j]);
            }
            img
        })
        .collect();
    let seed = images.into_iter().chain([StateSet::new(n), StateSet::full(n)]);
    Ok(ClosureFamily::from_set(n, close_under(seed, StateSet::union)))
}

/// `⟨P_μ, R_μ⟩` with `P_μ` the induced partition and
/// `R_μ = {(B, C) | C ⊆ μ(B)}`.
pub fn pair_of_closure(cf: &ClosureFamily) -> Result<PartitionRelationPair, DomainError> {
    let n = cf.universe;
    let blocks = induced_partition(cf);
    let images: Vec<StateSet> = blocks.iter().map(|b| apply(cf, b)).collect::<Result<_, _>>()?;
    let mut pairs = Vec::new();
    for (i, img) in images.iter().enumerate() {
        for (j, c) in blocks.iter().enumerate() {
            if c.is_subset(img) {
                pairs.push((i, j));
            }
        }
    }
    let block_lists: Vec<Vec<usize>> = blocks.iter().map(StateSet::to_vec).collect();
    Ok(PartitionRelationPair::from_blocks(n, &block_lists, pairs).expect("induced blocks partition the states"))
}

/// Whether `C ∩ pre(B) ≠ ∅ ⇒ ∪Rel(C) ⊆ pre(∪Rel(B))` for all blocks.
pub fn check_pre_completeness(pr: &PartitionRelationPair, ks: &KripkeStructure) -> bool {
    let blocks: Vec<BlockId> = pr.partition.scan_order().collect();
    let unions: Vec<StateSet> = blocks.iter().map(|&b| pr.union_rel(b)).collect();
    blocks.iter().zip(&unions).all(|(&b, ub)| {
        let pre_b = ks.pre(&pr.partition.block_set(b));
        let target = ks.pre(ub);
        blocks
            .iter()
            .zip(&unions)
            .filter(|(&c, _)| pr.partition.states(c).iter().any(|&s| pre_b.contains(s as usize)))
            .all(|(_, uc)| uc.is_subset(&target))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Parses families written as digit strings over 1-based states.
    fn fam(n: usize, text: &[&str]) -> Vec<StateSet> {
        text.iter()
            .map(|w| StateSet::from_states(n, w.chars().map(|c| c.to_digit(10).unwrap() as usize - 1)))
            .collect()
    }

    fn esempio() -> KripkeStructure {
        KripkeStructure::from_label_ids(4, &[(0, 0), (0, 2), (1, 2), (2, 3), (3, 3)], &[0, 0, 0, 1]).unwrap()
    }

    fn family_eq(cf: &ClosureFamily, n: usize, text: &[&str]) -> bool {
        let mut want = fam(n, text);
        want.sort();
        want.dedup();
        cf.sets() == want.as_slice()
    }

    #[test]
    fn apply_least_member() {
        let cf = moore_closure(4, fam(4, &["12", "123", "124", "1234"])).unwrap();
        assert_eq!(apply(&cf, &fam(4, &["3"])[0]).unwrap(), fam(4, &["123"])[0]);
        assert_eq!(apply(&cf, &StateSet::full(4)).unwrap(), StateSet::full(4));
    }

    #[test]
    fn moore_closure_of_labels() {
        let cf = moore_closure(4, fam(4, &["123", "4"])).unwrap();
        assert!(family_eq(&cf, 4, &["", "4", "123", "1234"]));
        let trivial = moore_closure(4, []).unwrap();
        assert!(family_eq(&trivial, 4, &["1234"]));
        assert_eq!(moore_closure(4, cf.sets().to_vec()).unwrap(), cf);
    }

    #[test]
    fn disjunctive_completion_example() {
        let cf = moore_closure(4, fam(4, &["", "3", "4", "12", "34", "1234"])).unwrap();
        let d = disjunctive_completion(&cf);
        assert!(family_eq(&d, 4, &["", "3", "4", "12", "34", "123", "124", "1234"]));
        assert_eq!(disjunctive_completion(&d), d);
    }

    #[test]
    fn same_partition_from_different_closures() {
        for sets in [&["12", "3", "4"][..], &["12", "123", "124"], &["12", "123", "124", "1234"]] {
            let cf = moore_closure(4, fam(4, sets)).unwrap();
            let blocks: Vec<Vec<usize>> = induced_partition(&cf).iter().map(StateSet::to_vec).collect();
            assert_eq!(blocks, vec![vec![0, 1], vec![2], vec![3]]);
        }
    }

    #[test]
    fn esempio_shell_trace() {
        let ks = esempio();
        let mu = label_closure(&ks).unwrap();
        let trace = pre_shell_trace(&mu, &ks);
        assert_eq!(trace.len(), 3);
        assert!(family_eq(&trace[1], 4, &["", "3", "4", "12", "34", "123", "1234"]));
        assert!(family_eq(&trace[2], 4, &["", "1", "3", "4", "12", "34", "123", "1234"]));
        let shell = forward_shell(&mu, &ks).unwrap();
        assert!(family_eq(
            &shell,
            4,
            &["", "1", "3", "4", "12", "13", "14", "34", "123", "124", "134", "1234"]
        ));
        assert_eq!(induced_partition(&shell).len(), 4);
        assert_eq!(
            preorder_from_closure(&shell),
            StateRelation::from_pairs(4, [(0, 0), (1, 1), (1, 0), (2, 2), (3, 3)])
        );
        assert_eq!(forward_shell(&shell, &ks).unwrap(), shell);
    }

    #[test]
    fn pair_closure_example() {
        let pr = PartitionRelationPair::from_blocks(
            4,
            &[vec![0, 1], vec![2], vec![3]],
            [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (2, 1)],
        )
        .unwrap();
        let cf = closure_of_pair(&pr).unwrap();
        assert!(family_eq(&cf, 4, &["", "34", "1234"]));
    }

    #[test]
    fn pair_of_trivial_closure() {
        let cf = moore_closure(2, []).unwrap();
        let pr = pair_of_closure(&cf).unwrap();
        assert_eq!(pr.partition.num_blocks(), 1);
        assert!(pr.is_reflexive());
    }

    #[test]
    fn pre_completeness_examples() {
        let ks = esempio();
        assert!(!check_pre_completeness(&PartitionRelationPair::initial(&ks), &ks));
        let edgeless = KripkeStructure::from_label_ids(3, &[], &[0, 1, 0]).unwrap();
        assert!(check_pre_completeness(&PartitionRelationPair::initial(&edgeless), &edgeless));
    }

    #[test]
    fn guard_rejects_large_universes() {
        assert!(matches!(moore_closure(17, []), Err(DomainError::TooLarge { size: 17, limit: 16 })));
        let cf = moore_closure(3, []).unwrap();
        assert!(matches!(apply(&cf, &StateSet::new(4)), Err(DomainError::CapacityMismatch { .. })));
    }
}
