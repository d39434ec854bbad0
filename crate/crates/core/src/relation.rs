//! State-level binary relations, used for preorders produced by every
//! algorithm so results can be compared pointwise.

use std::fmt;

use crate::bitset::StateSet;

/// A relation on `{0..n}` stored as one row bitset per state.
///
/// For simulation preorders `(s, t)` is read "`t` simulates `s`".
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StateRelation {
    rows: Vec<StateSet>,
}

impl StateRelation {
    pub fn empty(n: usize) -> Self {
        StateRelation { rows: vec![StateSet::new(n); n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for s in 0..n {
            r.insert(s, s);
        }
        r
    }

    /// Builds the relation `{(s, t) | t ∈ rows[s]}`.
    pub fn from_rows(rows: Vec<StateSet>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.capacity() == n), "row capacity must equal row count");
        StateRelation { rows }
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(n: usize, pairs: I) -> Self {
        let mut r = Self::empty(n);
        for (s, t) in pairs {
            r.insert(s, t);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, s: usize, t: usize) {
        self.rows[s].insert(t);
    }

    pub fn contains(&self, s: usize, t: usize) -> bool {
        self.rows[s].contains(t)
    }

    /// `{t | (s, t) ∈ R}`.
    pub fn row(&self, s: usize) -> &StateSet {
        &self.rows[s]
    }

    pub fn num_pairs(&self) -> usize {
        self.rows.iter().map(StateSet::len).sum()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(s, row)| row.iter().map(move |t| (s, t)))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.size()).all(|s| self.contains(s, s))
    }

    pub fn is_transitive(&self) -> bool {
        self.pairs().all(|(s, t)| self.rows[t].is_subset(&self.rows[s]))
    }

    /// Classes of `R ∩ R⁻¹`, each sorted, ordered by least member.
    pub fn equivalence_classes(&self) -> Vec<Vec<usize>> {
        let n = self.size();
        let mut assigned = vec![false; n];
        let mut classes = Vec::new();
        for s in 0..n {
            if assigned[s] {
                continue;
            }
            let class: Vec<usize> = (s..n)
                .filter(|&t| !assigned[t] && self.contains(s, t) && self.contains(t, s))
                .collect();
            for &t in &class {
                assigned[t] = true;
            }
            if class.is_empty() {
                // s is not related to itself; keep it as its own class.
                assigned[s] = true;
                classes.push(vec![s]);
            } else {
                classes.push(class);
            }
        }
        classes
    }

    /// The first pair on which two relations disagree, if any.
    pub fn first_difference(&self, other: &StateRelation) -> Option<(usize, usize)> {
        assert_eq!(self.size(), other.size());
        for s in 0..self.size() {
            if self.rows[s] != other.rows[s] {
                let diff = self.rows[s].difference(&other.rows[s]).union(&other.rows[s].difference(&self.rows[s]));
                return diff.first().map(|t| (s, t));
            }
        }
        None
    }
}

impl fmt::Debug for StateRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preorder_checks() {
        let r = StateRelation::from_pairs(3, [(0, 0), (1, 1), (2, 2), (1, 0)]);
        assert!(r.is_reflexive());
        assert!(r.is_transitive());
        assert_eq!(r.equivalence_classes(), vec![vec![0], vec![1], vec![2]]);

        let r = StateRelation::from_pairs(3, [(0, 1), (1, 2)]);
        assert!(!r.is_transitive());
        assert!(!r.is_reflexive());
    }

    #[test]
    fn classes_of_symmetric_pairs() {
        let r = StateRelation::from_pairs(4, [(0, 0), (1, 1), (2, 2), (3, 3), (0, 2), (2, 0), (1, 3)]);
        assert_eq!(r.equivalence_classes(), vec![vec![0, 2], vec![1], vec![3]]);
    }

    #[test]
    fn difference_reports_first_pair() {
        let a = StateRelation::identity(3);
        let mut b = a.clone();
        assert_eq!(a.first_difference(&b), None);
        b.insert(2, 1);
        assert_eq!(a.first_difference(&b), Some((2, 1)));
    }
}
