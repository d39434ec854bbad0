//! Kripke structures, labelled transition systems and the predecessor /
//! successor transformers.
//!
//! States are dense indices `0..n`. Transitions are stored twice in
//! compressed-row form (predecessor lists and successor lists) so that both
//! `pre` and `post` run in time linear in the touched adjacency.

use std::collections::HashMap;

use crate::bitset::StateSet;
use crate::error::ModelError;

/// Reserved atom given to original LTS states by [`lts_to_kripke`].
pub const STATE_ATOM: &str = "#state";

/// Compressed adjacency: `targets[offsets[s]..offsets[s + 1]]` are the
/// neighbours of `s`, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Adjacency {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Adjacency {
    fn build(num_states: usize, edges: &[(u32, u32)], reverse: bool) -> Self {
        let mut offsets = vec![0u32; num_states + 1];
        for &(s, t) in edges {
            let key = if reverse { t } else { s };
            offsets[key as usize + 1] += 1;
        }
        for i in 0..num_states {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; edges.len()];
        for &(s, t) in edges {
            let (key, val) = if reverse { (t, s) } else { (s, t) };
            let slot = &mut fill[key as usize];
            targets[*slot as usize] = val;
            *slot += 1;
        }
        for s in 0..num_states {
            targets[offsets[s] as usize..offsets[s + 1] as usize].sort_unstable();
        }
        Adjacency { offsets, targets }
    }

    #[inline]
    fn of(&self, s: usize) -> &[u32] {
        &self.targets[self.offsets[s] as usize..self.offsets[s + 1] as usize]
    }
}

/// A finite Kripke structure `(Σ, →, ℓ)`.
///
/// Labels are interned: every distinct atom set gets a label-class id, and
/// two states carry the same label iff their class ids are equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeStructure {
    num_states: usize,
    pred: Adjacency,
    succ: Adjacency,
    label_of: Vec<u32>,
    classes: Vec<Vec<u32>>,
    atom_names: Vec<String>,
    duplicates_dropped: usize,
}

impl KripkeStructure {
    #[inline]
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    #[inline]
    pub fn num_transitions(&self) -> usize {
        self.succ.targets.len()
    }

    /// `pre({s})`, sorted.
    #[inline]
    pub fn predecessors(&self, s: usize) -> &[u32] {
        self.pred.of(s)
    }

    /// `post({s})`, sorted.
    #[inline]
    pub fn successors(&self, s: usize) -> &[u32] {
        self.succ.of(s)
    }

    #[inline]
    pub fn out_degree(&self, s: usize) -> usize {
        self.succ.of(s).len()
    }

    #[inline]
    pub fn has_edge(&self, s: usize, t: usize) -> bool {
        self.succ.of(s).binary_search(&(t as u32)).is_ok()
    }

    /// Iterates all transitions `(s, t)` ordered by source then target.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_states).flat_map(move |s| self.successors(s).iter().map(move |&t| (s, t as usize)))
    }

    /// Label-class id of `s`; equal ids mean equal labels.
    #[inline]
    pub fn label(&self, s: usize) -> u32 {
        self.label_of[s]
    }

    #[inline]
    pub fn same_label(&self, s: usize, t: usize) -> bool {
        self.label_of[s] == self.label_of[t]
    }

    pub fn num_label_classes(&self) -> usize {
        self.classes.len()
    }

    /// Atom ids making up the label of `s`, sorted.
    pub fn atoms(&self, s: usize) -> &[u32] {
        &self.classes[self.label_of[s] as usize]
    }

    pub fn atom_names(&self) -> &[String] {
        &self.atom_names
    }

    pub fn atom_name(&self, atom: u32) -> &str {
        &self.atom_names[atom as usize]
    }

    /// Number of duplicate edges discarded while building.
    pub fn duplicates_dropped(&self) -> usize {
        self.duplicates_dropped
    }

    pub fn is_total(&self) -> bool {
        (0..self.num_states).all(|s| self.out_degree(s) > 0)
    }

    /// `pre(Y) = {a | ∃b ∈ Y. a → b}`.
    pub fn pre(&self, ys: &StateSet) -> StateSet {
        debug_assert_eq!(ys.capacity(), self.num_states);
        let mut out = StateSet::new(self.num_states);
        for y in ys.iter() {
            for &x in self.predecessors(y) {
                out.insert(x as usize);
            }
        }
        out
    }

    /// `post(Y) = {b | ∃a ∈ Y. a → b}`.
    pub fn post(&self, ys: &StateSet) -> StateSet {
        debug_assert_eq!(ys.capacity(), self.num_states);
        let mut out = StateSet::new(self.num_states);
        for y in ys.iter() {
            for &x in self.successors(y) {
                out.insert(x as usize);
            }
        }
        out
    }

    /// `pre(Σ)`: all states with at least one successor.
    pub fn pre_all(&self) -> StateSet {
        StateSet::from_states(self.num_states, (0..self.num_states).filter(|&s| self.out_degree(s) > 0))
    }

    /// The label class `[s]_ℓ` as a set.
    pub fn label_block(&self, s: usize) -> StateSet {
        let l = self.label_of[s];
        StateSet::from_states(self.num_states, (0..self.num_states).filter(|&t| self.label_of[t] == l))
    }

    /// Re-checks the adjacency invariants: indices in range, transition
    /// totals agree, and each out-degree matches the predecessor lists.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.num_states;
        if n == 0 {
            return Err(ModelError::EmptyStateSpace);
        }
        if self.pred.targets.len() != self.succ.targets.len() {
            return Err(ModelError::Inconsistent(format!(
                "{} predecessor entries vs {} successor entries",
                self.pred.targets.len(),
                self.succ.targets.len()
            )));
        }
        let mut seen_out = vec![0usize; n];
        for t in 0..n {
            for &s in self.predecessors(t) {
                let s = s as usize;
                if s >= n {
                    return Err(ModelError::StateOutOfRange { state: s, num_states: n });
                }
                seen_out[s] += 1;
            }
        }
        for (s, &count) in seen_out.iter().enumerate() {
            if count != self.out_degree(s) {
                return Err(ModelError::Inconsistent(format!(
                    "state {s}: out-degree {} but appears in {count} predecessor lists",
                    self.out_degree(s)
                )));
            }
        }
        Ok(())
    }
}

/// Incremental constructor for [`KripkeStructure`].
///
/// Duplicate edges are dropped at [`build`](KripkeBuilder::build) time.
#[derive(Debug, Clone)]
pub struct KripkeBuilder {
    num_states: usize,
    edges: Vec<(u32, u32)>,
    atoms: Vec<Vec<u32>>,
    atom_ids: HashMap<String, u32>,
    atom_names: Vec<String>,
}

impl KripkeBuilder {
    pub fn new(num_states: usize) -> Self {
        KripkeBuilder {
            num_states,
            edges: Vec::new(),
            atoms: vec![Vec::new(); num_states],
            atom_ids: HashMap::new(),
            atom_names: Vec::new(),
        }
    }

    fn check(&self, s: usize) -> Result<(), ModelError> {
        if s >= self.num_states {
            Err(ModelError::StateOutOfRange { state: s, num_states: self.num_states })
        } else {
            Ok(())
        }
    }

    pub fn add_edge(&mut self, s: usize, t: usize) -> Result<&mut Self, ModelError> {
        self.check(s)?;
        self.check(t)?;
        self.edges.push((s as u32, t as u32));
        Ok(self)
    }

    /// Interns `name` and returns its atom id.
    pub fn intern_atom(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.atom_ids.get(name) {
            return id;
        }
        let id = self.atom_names.len() as u32;
        self.atom_names.push(name.to_owned());
        self.atom_ids.insert(name.to_owned(), id);
        id
    }

    pub fn add_atom(&mut self, s: usize, name: &str) -> Result<&mut Self, ModelError> {
        self.check(s)?;
        let id = self.intern_atom(name);
        self.atoms[s].push(id);
        Ok(self)
    }

    pub fn build(self) -> Result<KripkeStructure, ModelError> {
        let n = self.num_states;
        if n == 0 {
            return Err(ModelError::EmptyStateSpace);
        }
        let mut edges = self.edges;
        let raw = edges.len();
        edges.sort_unstable();
        edges.dedup();
        let duplicates_dropped = raw - edges.len();
        if duplicates_dropped > 0 {
            log::warn!("dropped {duplicates_dropped} duplicate edge(s)");
        }

        let mut class_ids: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut classes = Vec::new();
        let mut label_of = Vec::with_capacity(n);
        for mut set in self.atoms {
            set.sort_unstable();
            set.dedup();
            let next = classes.len() as u32;
            let id = *class_ids.entry(set.clone()).or_insert_with(|| {
                classes.push(set);
                next
            });
            label_of.push(id);
        }

        Ok(KripkeStructure {
            num_states: n,
            pred: Adjacency::build(n, &edges, true),
            succ: Adjacency::build(n, &edges, false),
            label_of,
            classes,
            atom_names: self.atom_names,
            duplicates_dropped,
        })
    }
}

impl KripkeStructure {
    /// Builds a structure whose labels are given as label-class ids; state
    /// `s` receives the single atom `p<labels[s]>`.
    pub fn from_label_ids(
        num_states: usize,
        edges: &[(usize, usize)],
        labels: &[u32],
    ) -> Result<Self, ModelError> {
        let mut b = KripkeBuilder::new(num_states);
        for &(s, t) in edges {
            b.add_edge(s, t)?;
        }
        for (s, &l) in labels.iter().enumerate() {
            b.add_atom(s, &format!("p{l}"))?;
        }
        b.build()
    }
}

/// A labelled transition system: transitions carry labels, states do not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledTs {
    pub num_states: usize,
    pub initial: usize,
    /// `(source, label id, target)`.
    pub transitions: Vec<(u32, u32, u32)>,
    pub label_names: Vec<String>,
}

impl LabelledTs {
    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }
}

/// Encodes an LTS as a Kripke structure.
///
/// Every transition `s —l→ t` becomes `s → n → t` through a fresh state `n`
/// labelled `{l}`; fresh state for transition `i` is `num_states + i`. All
/// original states share the reserved atom [`STATE_ATOM`] (made unique if an
/// action happens to use the same name).
pub fn lts_to_kripke(lts: &LabelledTs) -> Result<KripkeStructure, ModelError> {
    let n = lts.num_states;
    let total = n + lts.transitions.len();
    let mut b = KripkeBuilder::new(total);

    let mut state_atom = STATE_ATOM.to_owned();
    while lts.label_names.iter().any(|l| *l == state_atom) {
        state_atom.push('#');
    }
    for s in 0..n {
        b.add_atom(s, &state_atom)?;
    }
    for (i, &(src, label, dst)) in lts.transitions.iter().enumerate() {
        let mid = n + i;
        b.add_edge(src as usize, mid)?;
        b.add_edge(mid, dst as usize)?;
        b.add_atom(mid, &lts.label_names[label as usize])?;
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// The four-state running example, states 1..4 mapped to 0..3.
    fn esempio() -> KripkeStructure {
        KripkeStructure::from_label_ids(4, &[(0, 0), (0, 2), (1, 2), (2, 3), (3, 3)], &[0, 0, 0, 1]).unwrap()
    }

    fn set(xs: &[usize]) -> StateSet {
        StateSet::from_states(4, xs.iter().copied())
    }

    #[test]
    fn pre_on_esempio() {
        let ks = esempio();
        assert_eq!(ks.pre(&set(&[3])), set(&[2, 3]));
        assert_eq!(ks.pre(&set(&[0, 1])), set(&[0]));
        assert!(ks.pre(&set(&[])).is_empty());
    }

    #[test]
    fn post_on_esempio() {
        let ks = esempio();
        assert_eq!(ks.post(&set(&[2])), set(&[3]));
        assert_eq!(ks.post(&set(&[0])), set(&[0, 2]));
        assert!(ks.post(&set(&[])).is_empty());
    }

    #[test]
    fn duplicate_edges_are_dropped() {
        let ks = KripkeStructure::from_label_ids(2, &[(0, 1), (0, 1), (1, 0)], &[0, 0]).unwrap();
        assert_eq!(ks.num_transitions(), 2);
        assert_eq!(ks.duplicates_dropped(), 1);
        ks.validate().unwrap();
    }

    #[test]
    fn builder_rejects_out_of_range() {
        let mut b = KripkeBuilder::new(2);
        assert_eq!(
            b.add_edge(0, 2).unwrap_err(),
            ModelError::StateOutOfRange { state: 2, num_states: 2 }
        );
        assert_eq!(KripkeBuilder::new(0).build().unwrap_err(), ModelError::EmptyStateSpace);
    }

    #[test]
    fn atom_sets_compare_as_sets() {
        let mut b = KripkeBuilder::new(3);
        b.add_atom(0, "p").unwrap().add_atom(0, "q").unwrap();
        b.add_atom(1, "q").unwrap().add_atom(1, "p").unwrap().add_atom(1, "p").unwrap();
        b.add_atom(2, "p").unwrap();
        let ks = b.build().unwrap();
        assert!(ks.same_label(0, 1));
        assert!(!ks.same_label(0, 2));
        assert_eq!(ks.num_label_classes(), 2);
    }

    #[test]
    fn lts_transform_minimal() {
        let lts = LabelledTs {
            num_states: 2,
            initial: 0,
            transitions: vec![(0, 0, 1)],
            label_names: vec!["a".into()],
        };
        let ks = lts_to_kripke(&lts).unwrap();
        assert_eq!(ks.num_states(), 3);
        assert_eq!(ks.num_transitions(), 2);
        assert!(ks.has_edge(0, 2) && ks.has_edge(2, 1));
        assert!(ks.same_label(0, 1));
        assert!(!ks.same_label(0, 2));
        assert_eq!(ks.atom_name(ks.atoms(0)[0]), STATE_ATOM);
    }

    #[test]
    fn lts_transform_avoids_reserved_collision() {
        let lts = LabelledTs {
            num_states: 1,
            initial: 0,
            transitions: vec![(0, 0, 0)],
            label_names: vec![STATE_ATOM.into()],
        };
        let ks = lts_to_kripke(&lts).unwrap();
        assert!(!ks.same_label(0, 1));
    }

    fn arb_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (1usize..12).prop_flat_map(|n| (Just(n), proptest::collection::vec((0..n, 0..n), 0..40)))
    }

    proptest! {
        #[test]
        fn pre_and_post_are_additive(
            (n, edges) in arb_graph(),
            a in proptest::collection::vec(0usize..12, 0..8),
            b in proptest::collection::vec(0usize..12, 0..8),
        ) {
            let ks = KripkeStructure::from_label_ids(n, &edges, &vec![0; n]).unwrap();
            let a = StateSet::from_states(n, a.into_iter().filter(|&x| x < n));
            let b = StateSet::from_states(n, b.into_iter().filter(|&x| x < n));
            let ab = a.union(&b);
            prop_assert_eq!(ks.pre(&ab), ks.pre(&a).union(&ks.pre(&b)));
            prop_assert_eq!(ks.post(&ab), ks.post(&a).union(&ks.post(&b)));
        }

        #[test]
        fn empty_post_iff_sink((n, edges) in arb_graph()) {
            let ks = KripkeStructure::from_label_ids(n, &edges, &vec![0; n]).unwrap();
            ks.validate().unwrap();
            for s in 0..n {
                let post = ks.post(&StateSet::from_states(n, [s]));
                prop_assert_eq!(post.is_empty(), ks.out_degree(s) == 0);
            }
        }

        #[test]
        fn lts_transform_sizes(
            n in 1usize..10,
            ts in proptest::collection::vec((0u32..10, 0u32..3, 0u32..10), 0..30),
        ) {
            let transitions: Vec<_> = ts.into_iter()
                .map(|(s, l, t)| (s % n as u32, l, t % n as u32))
                .collect();
            let lts = LabelledTs {
                num_states: n,
                initial: 0,
                transitions: transitions.clone(),
                label_names: vec!["a".into(), "b".into(), "c".into()],
            };
            let ks = lts_to_kripke(&lts).unwrap();
            prop_assert_eq!(ks.num_states(), n + transitions.len());
            prop_assert_eq!(ks.num_transitions(), 2 * transitions.len());
        }
    }
}
