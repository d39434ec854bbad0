//! State-based simulation algorithms and a naive fixpoint oracle.
//!
//! Each algorithm returns one set per state: `sim[v]` holds the states that
//! simulate `v`. The refined and counter-based variants can reproduce the
//! historical statement placement that makes them unsound, selected by a
//! runtime flag.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algorithms::default_checks;
use crate::bitset::StateSet;
use crate::model::KripkeStructure;
use crate::relation::StateRelation;

/// `sim[v]` = states simulating `v`.
pub type SimSets = Vec<StateSet>;

/// Order in which pending work items are chosen. Results never depend on
/// it; randomized scheduling exists to test exactly that.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Schedule {
    #[default]
    LowestFirst,
    Randomized(u64),
}

#[derive(Clone, Debug, Default)]
pub struct RefOptions {
    pub buggy: bool,
    pub schedule: Schedule,
    /// `None` picks [`default_checks`]. Ignored in buggy mode.
    pub check_invariants: Option<bool>,
}

pub fn sets_to_relation(sim: SimSets) -> StateRelation {
    StateRelation::from_rows(sim)
}

enum Worklist {
    Lowest(BTreeSet<u32>),
    Random { items: Vec<u32>, present: Vec<bool>, rng: ChaCha8Rng },
}

impl Worklist {
    fn new(n: usize, schedule: Schedule) -> Self {
        match schedule {
            Schedule::LowestFirst => Worklist::Lowest(BTreeSet::new()),
            Schedule::Randomized(seed) => Worklist::Random {
                items: Vec::new(),
                present: vec![false; n],
                rng: ChaCha8Rng::seed_from_u64(seed),
            },
        }
    }

    fn push(&mut self, v: usize) {
        match self {
            Worklist::Lowest(set) => {
                set.insert(v as u32);
            }
            Worklist::Random { items, present, .. } => {
                if !present[v] {
                    present[v] = true;
                    items.push(v as u32);
                }
            }
        }
    }

    fn pop(&mut self) -> Option<usize> {
        match self {
            Worklist::Lowest(set) => set.pop_first().map(|v| v as usize),
            Worklist::Random { items, present, rng } => {
                if items.is_empty() {
                    return None;
                }
                let i = rng.gen_range(0..items.len());
                let v = items.swap_remove(i) as usize;
                present[v] = false;
                Some(v)
            }
        }
    }
}

fn post_sets(ks: &KripkeStructure) -> Vec<StateSet> {
    let n = ks.num_states();
    (0..n)
        .map(|s| StateSet::from_states(n, ks.successors(s).iter().map(|&t| t as usize)))
        .collect()
}

/// Initial `Sim(v)`: the label class of `v`, restricted to states with
/// successors unless `v` is a sink.
fn initial_sim(ks: &KripkeStructure) -> SimSets {
    let pre_all = ks.pre_all();
    (0..ks.num_states())
        .map(|v| {
            let class = ks.label_block(v);
            if ks.out_degree(v) == 0 {
                class
            } else {
                class.intersection(&pre_all)
            }
        })
        .collect()
}

pub fn schematic_similarity(ks: &KripkeStructure) -> SimSets {
    schematic_similarity_with(ks, Schedule::LowestFirst)
}

/// Removes `w` from `Sim(u)` while some `u → v` has `post(w) ∩ Sim(v) = ∅`.
pub fn schematic_similarity_with(ks: &KripkeStructure, schedule: Schedule) -> SimSets {
    let n = ks.num_states();
    let post = post_sets(ks);
    let mut sim: SimSets = (0..n).map(|v| ks.label_block(v)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = match schedule {
        Schedule::LowestFirst => None,
        Schedule::Randomized(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    loop {
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }
        let mut changed = false;
        for &u in &order {
            for &v in ks.successors(u) {
                let v = v as usize;
                for w in sim[u].to_vec() {
                    if !post[w].intersects(&sim[v]) {
                        sim[u].remove(w);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return sim;
        }
    }
}

pub fn refined_similarity(ks: &KripkeStructure, buggy: bool) -> SimSets {
    refined_similarity_with(ks, &RefOptions { buggy, ..RefOptions::default() })
}

/// Selects `v` while `Sim(v) ≠ prevSim(v)` and removes
/// `pre(prevSim(v)) ∖ pre(Sim(v))` from `Sim(u)` for every `u → v`.
pub fn refined_similarity_with(ks: &KripkeStructure, opts: &RefOptions) -> SimSets {
    let n = ks.num_states();
    let checks = !opts.buggy && opts.check_invariants.unwrap_or_else(|| default_checks(n));
    let mut sim = initial_sim(ks);
    let mut prev_sim: SimSets = vec![StateSet::full(n); n];
    let mut work = Worklist::new(n, opts.schedule);
    for v in 0..n {
        if sim[v] != prev_sim[v] {
            work.push(v);
        }
    }
    while let Some(v) = work.pop() {
        if checks {
            for x in 0..n {
                assert!(sim[x].is_subset(&prev_sim[x]), "Inv1 violated at state {x}");
            }
        }
        let remove = ks.pre(&prev_sim[v]).difference(&ks.pre(&sim[v]));
        if !opts.buggy {
            prev_sim[v] = sim[v].clone();
        }
        for &u in ks.predecessors(v) {
            sim[u as usize].difference_with(&remove);
        }
        if opts.buggy {
            prev_sim[v] = sim[v].clone();
        }
        for &u in ks.predecessors(v).iter().chain(std::iter::once(&(v as u32))) {
            let u = u as usize;
            if sim[u] != prev_sim[u] {
                work.push(u);
            }
        }
    }
    sim
}

pub fn hhk(ks: &KripkeStructure, buggy: bool) -> SimSets {
    hhk_with(ks, &RefOptions { buggy, ..RefOptions::default() })
}

/// Counter-based version: `Remove(v)` is maintained incrementally and
/// `Count(u, x) = |post(x) ∩ Sim(u)|` answers `x ∈ pre(Sim(u))` in constant
/// time.
pub fn hhk_with(ks: &KripkeStructure, opts: &RefOptions) -> SimSets {
    let n = ks.num_states();
    let checks = !opts.buggy && opts.check_invariants.unwrap_or_else(|| default_checks(n));
    let mut sim = initial_sim(ks);
    // count[u * n + x] = |post(x) ∩ Sim(u)|
    let mut count = vec![0u32; n * n];
    for (u, row) in sim.iter().enumerate() {
        for s in row.iter() {
            for &x in ks.predecessors(s) {
                count[u * n + x as usize] += 1;
            }
        }
    }
    let pre_all = ks.pre_all();
    let mut remove: SimSets = (0..n)
        .map(|v| StateSet::from_states(n, pre_all.iter().filter(|&x| count[v * n + x] == 0)))
        .collect();
    let mut work = Worklist::new(n, opts.schedule);
    for (v, r) in remove.iter().enumerate() {
        if !r.is_empty() {
            work.push(v);
        }
    }
    let mut prev_sim: SimSets = if checks { vec![StateSet::full(n); n] } else { Vec::new() };
    let mut consumed: SimSets = if checks { vec![StateSet::new(n); n] } else { Vec::new() };

    while let Some(v) = work.pop() {
        if checks {
            check_hhk(ks, &sim, &prev_sim, &remove, &count);
            prev_sim[v] = sim[v].clone();
            assert!(consumed[v].is_disjoint(&remove[v]), "remove sets of state {v} overlap");
            consumed[v].union_with(&remove[v]);
        }
        let current = if opts.buggy {
            remove[v].to_vec()
        } else {
            std::mem::replace(&mut remove[v], StateSet::new(n)).to_vec()
        };
        for &u in ks.predecessors(v) {
            let u = u as usize;
            for &w in &current {
                if !sim[u].remove(w) {
                    continue;
                }
                for &w2 in ks.predecessors(w) {
                    let c = &mut count[u * n + w2 as usize];
                    *c -= 1;
                    if *c == 0 && remove[u].insert(w2 as usize) {
                        work.push(u);
                    }
                }
            }
        }
        if opts.buggy {
            remove[v].clear();
        }
    }
    if checks {
        check_hhk(ks, &sim, &prev_sim, &remove, &count);
    }
    sim
}

fn check_hhk(ks: &KripkeStructure, sim: &SimSets, prev_sim: &SimSets, remove: &SimSets, count: &[u32]) {
    let n = ks.num_states();
    for v in 0..n {
        let expected = ks.pre(&prev_sim[v]).difference(&ks.pre(&sim[v]));
        assert_eq!(remove[v], expected, "Inv3 violated at state {v}");
        for x in 0..n {
            let actual = ks.successors(x).iter().filter(|&&t| sim[v].contains(t as usize)).count() as u32;
            assert_eq!(count[v * n + x], actual, "stale count ({x}, {v})");
        }
    }
}

/// Greatest fixpoint of the simulation condition, starting from label
/// equality.
pub fn naive_oracle(ks: &KripkeStructure) -> StateRelation {
    naive_oracle_counted(ks).0
}

/// [`naive_oracle`] plus the number of sweeps until stabilisation.
pub fn naive_oracle_counted(ks: &KripkeStructure) -> (StateRelation, usize) {
    let n = ks.num_states();
    let mut rows: Vec<StateSet> = (0..n).map(|s| ks.label_block(s)).collect();
    let mut sweeps = 0;
    loop {
        sweeps += 1;
        // s' may simulate s only if every successor t of s is matched:
        // s' ∈ pre(R(t)).
        let pre_rows: Vec<StateSet> = rows.iter().map(|r| ks.pre(r)).collect();
        let mut changed = false;
        for (s, row) in rows.iter_mut().enumerate() {
            let before = row.len();
            for &t in ks.successors(s) {
                row.intersect_with(&pre_rows[t as usize]);
            }
            changed |= row.len() != before;
        }
        if !changed {
            return (StateRelation::from_rows(rows), sweeps);
        }
    }
}
