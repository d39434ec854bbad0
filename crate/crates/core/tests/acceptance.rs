//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and
//! exits nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use simshell_core::algorithms::{
    basic_sa, compute, expand_preorder, refined_sa, sa_with, Algorithm, RemoveInit, RunOptions, SaOptions, SimResult,
};
use simshell_core::domains::{
    check_pre_completeness, closure_of_pair, disjunctive_completion, forward_shell, induced_partition, label_closure,
    pair_of_closure, pre_shell_trace, preorder_from_closure, ClosureFamily,
};
use simshell_core::generate::{generate, generate_layered, GenSpec, LayeredSpec};
use simshell_core::parse::parse_aut;
use simshell_core::reference::{hhk, naive_oracle, refined_similarity, RefOptions};
use simshell_core::{initial_partition, lts_to_kripke, KripkeStructure, PartitionRelationPair, StateSet};

use common::{esempio, esempio_preorder, sweep_instance};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn criterion(id: u32, name: &str, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Outcome::Fail(format!("panicked: {msg}"))
    });
    let secs = start.elapsed().as_secs_f64();
    let (tag, detail, ok) = match outcome {
        Outcome::Pass(d) => ("PASS", d, true),
        Outcome::Fail(d) => ("FAIL", d, false),
        Outcome::Skip(d) => ("SKIP", d, true),
    };
    println!("[{tag}] criterion {id}: {name} ({secs:.2}s) {detail}");
    ok
}

const ALL_ALGOS: [Algorithm; 7] = [
    Algorithm::Schematic,
    Algorithm::RefinedSimilarity,
    Algorithm::Hhk,
    Algorithm::Basic,
    Algorithm::Refined,
    Algorithm::Sa,
    Algorithm::Shell,
];

fn worked_example() -> Outcome {
    let ks = esempio();
    let expected = esempio_preorder();
    let singletons: Vec<Vec<usize>> = (0..4).map(|s| vec![s]).collect();
    let start = Instant::now();
    for alg in ALL_ALGOS {
        let res = compute(&ks, alg, &RunOptions::default()).unwrap();
        let got = expand_preorder(&res);
        if got != expected {
            return Outcome::Fail(format!("{alg}: preorder {got:?}"));
        }
        if res.blocks != singletons {
            return Outcome::Fail(format!("{alg}: partition {:?}", res.blocks));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(1) {
        return Outcome::Fail(format!("took {elapsed:?}"));
    }
    Outcome::Pass(format!("7 algorithms exact in {elapsed:?}"))
}

fn bug_regression() -> Outcome {
    let ks = esempio();
    let start = Instant::now();
    let refined_bug = refined_similarity(&ks, true);
    let hhk_bug = hhk(&ks, true);
    let refined_ok = refined_similarity(&ks, false);
    let hhk_ok = hhk(&ks, false);
    let one_two = StateSet::from_states(4, [0, 1]);
    if refined_bug[0] != one_two {
        return Outcome::Fail(format!("buggy refined: Sim(1) = {}", refined_bug[0]));
    }
    if hhk_bug[0] != one_two {
        return Outcome::Fail(format!("buggy counter-based: Sim(1) = {}", hhk_bug[0]));
    }
    if refined_ok[0].contains(1) || hhk_ok[0].contains(1) {
        return Outcome::Fail("correct placement still lets 2 simulate 1".into());
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(1) {
        return Outcome::Fail(format!("took {elapsed:?}"));
    }
    Outcome::Pass("buggy placements report Sim(1) = {1,2}; corrected ones do not".into())
}

fn oracle_sweep() -> Outcome {
    let start = Instant::now();
    let mut shell_checked = 0;
    let mut alt_init_total_checked = 0;
    let mut alt_init_divergent_nontotal = 0;
    for i in 0..1000u64 {
        let ks = sweep_instance(i);
        let oracle = naive_oracle(&ks);
        let mut algos = vec![Algorithm::Sa, Algorithm::Basic, Algorithm::Refined, Algorithm::Hhk];
        algos.extend([Algorithm::Schematic, Algorithm::RefinedSimilarity]);
        if ks.num_states() <= 7 {
            algos.push(Algorithm::Shell);
            shell_checked += 1;
        }
        for alg in algos {
            let res = compute(&ks, alg, &RunOptions::default()).unwrap();
            if let Some(p) = expand_preorder(&res).first_difference(&oracle) {
                return Outcome::Fail(format!("instance {i}: {alg} disagrees with the oracle at {p:?}"));
            }
        }
        let alt = sa_with(
            &ks,
            PartitionRelationPair::initial(&ks),
            &SaOptions { init: RemoveInit::Predecessors, check_invariants: None },
        );
        let agrees = expand_preorder(&alt) == oracle;
        if ks.is_total() {
            alt_init_total_checked += 1;
            if !agrees {
                return Outcome::Fail(format!("instance {i}: predecessor-based initialisation differs on a total structure"));
            }
        } else if !agrees {
            alt_init_divergent_nontotal += 1;
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(300) {
        return Outcome::Fail(format!("took {elapsed:?}"));
    }
    Outcome::Pass(format!(
        "1000 instances, 0 mismatches, shell on {shell_checked}; predecessor-based init agrees on all \
         {alt_init_total_checked} total instances and diverges on {alt_init_divergent_nontotal} non-total ones"
    ))
}

/// Small graphs: every graph on 1 and 2 states, every seventh edge set on
/// 3 states, all under two labellings, plus seeded graphs on 4..6 states.
fn structured_instances() -> Vec<KripkeStructure> {
    let mut out = Vec::new();
    for n in 1..=3usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        let step = if n == 3 { 7 } else { 1 };
        let labellings: Vec<Vec<u32>> = if n == 1 {
            vec![vec![0]]
        } else {
            vec![vec![0; n], (0..n).map(|s| u32::from(s + 1 == n)).collect()]
        };
        for mask in (0..1u32 << pairs.len()).step_by(step) {
            let edges: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &e)| e).collect();
            for labels in &labellings {
                out.push(KripkeStructure::from_label_ids(n, &edges, labels).unwrap());
            }
        }
    }
    for seed in 0..20u64 {
        let spec = GenSpec {
            num_states: 4 + (seed % 3) as usize,
            num_labels: 1 + (seed % 2) as usize,
            edge_density: 0.2 + 0.1 * (seed % 5) as f64,
            total: seed % 2 == 0,
            seed: 10_000 + seed,
        };
        out.push(generate(&spec).unwrap());
    }
    out
}

fn blocks_of(view: &[StateSet]) -> Vec<Vec<usize>> {
    let mut b: Vec<Vec<usize>> = view.iter().map(StateSet::to_vec).collect();
    b.sort();
    b
}

/// Whether every block of `fine` lies inside a block of `coarse`.
fn refines(fine: &[Vec<usize>], coarse: &[Vec<usize>]) -> bool {
    fine.iter().all(|b| coarse.iter().any(|c| b.iter().all(|s| c.contains(s))))
}

fn shell_theory_instance(idx: usize, ks: &KripkeStructure) -> Result<(), String> {
    let n = ks.num_states();
    let mu = label_closure(ks).map_err(|e| e.to_string())?;
    let shell = forward_shell(&mu, ks).map_err(|e| e.to_string())?;
    if !shell.is_union_closed() || !shell.is_pre_closed(ks) || !shell.is_intersection_closed() {
        return Err(format!("instance {idx}: shell not union/pre/intersection closed"));
    }
    let oracle = naive_oracle(ks);
    if preorder_from_closure(&shell) != oracle {
        return Err(format!("instance {idx}: shell preorder differs from the oracle"));
    }
    if blocks_of(&induced_partition(&shell)) != oracle.equivalence_classes() {
        return Err(format!("instance {idx}: shell partition differs from the simulation classes"));
    }

    let mut families: Vec<ClosureFamily> = pre_shell_trace(&mu, ks);
    families.push(shell.clone());
    for (k, f) in families.iter().enumerate() {
        let d = disjunctive_completion(f);
        if blocks_of(&induced_partition(f)) != blocks_of(&induced_partition(&d)) {
            return Err(format!("instance {idx}: family {k} and its completion induce different partitions"));
        }
        let a = pair_of_closure(f).map_err(|e| e.to_string())?;
        let b = pair_of_closure(&d).map_err(|e| e.to_string())?;
        if a.canonical() != b.canonical() {
            return Err(format!("instance {idx}: pair of family {k} differs from pair of its completion"));
        }
    }

    let sa_res = compute(ks, Algorithm::Sa, &RunOptions::default()).unwrap();
    let sa_pair = sa_res.to_pair();
    if !check_pre_completeness(&sa_pair, ks) {
        return Err(format!("instance {idx}: final pair fails the pre-completeness condition"));
    }
    for pr in [PartitionRelationPair::initial(ks), sa_pair.clone()] {
        let closure = closure_of_pair(&pr).map_err(|e| e.to_string())?;
        let coarse = blocks_of(&induced_partition(&closure));
        if !refines(&pr.partition.to_blocks(), &coarse) {
            return Err(format!("instance {idx}: partition does not refine that of its closure"));
        }
    }
    // The final relation is a partial order on the classes.
    let back = pair_of_closure(&closure_of_pair(&sa_pair).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    if back.canonical() != sa_pair.canonical() {
        return Err(format!("instance {idx}: pair -> closure -> pair round trip changed the pair"));
    }
    for res in [
        basic_sa(ks, PartitionRelationPair::initial(ks)),
        refined_sa(ks, PartitionRelationPair::initial(ks)),
        sa_res,
    ] {
        if closure_of_pair(&res.to_pair()).map_err(|e| e.to_string())? != shell {
            return Err(format!("instance {idx}: closure of an algorithm output differs from the shell"));
        }
    }

    // Splitting by S ⊆ T equals splitting by T ∖ S when T is a union of blocks.
    let p = initial_partition(ks);
    let blocks = p.to_blocks();
    for t_mask in 0..(1u32 << blocks.len().min(4)) {
        let t = StateSet::from_states(
            n,
            blocks.iter().enumerate().filter(|(i, _)| t_mask & (1 << i) != 0).flat_map(|(_, b)| b.iter().copied()),
        );
        for s_pick in [1usize, 2, 3] {
            let s = StateSet::from_states(n, t.iter().filter(|x| (x + idx) % s_pick == 0));
            let mut a = p.clone();
            let mut b = p.clone();
            a.split_set(&s);
            b.split_set(&t.difference(&s));
            if a.to_blocks() != b.to_blocks() {
                return Err(format!("instance {idx}: split by S and by T minus S differ"));
            }
        }
    }
    Ok(())
}

fn shell_theory() -> Outcome {
    let instances = structured_instances();
    for (idx, ks) in instances.iter().enumerate() {
        if let Err(e) = shell_theory_instance(idx, ks) {
            return Outcome::Fail(e);
        }
    }
    Outcome::Pass(format!("{} structured instances, 0 violations", instances.len()))
}

fn check_counters(tag: &str, ks: &KripkeStructure, res: &SimResult) -> Result<(), String> {
    let p_in = initial_partition(ks).num_blocks() as u64;
    let p_sim = res.num_blocks() as u64;
    let s = &res.stats;
    if s.blocks_created != 2 * (p_sim - p_in) {
        return Err(format!("{tag}: blocks_created {} but |Psim|={p_sim}, |Pin|={p_in}", s.blocks_created));
    }
    if s.matrix_insertions != p_sim - p_in {
        return Err(format!("{tag}: {} matrix insertions but |Psim|={p_sim}, |Pin|={p_in}", s.matrix_insertions));
    }
    if cfg!(debug_assertions) && s.invariant_checks == 0 {
        return Err(format!("{tag}: invariant checks did not run"));
    }
    Ok(())
}

fn counter_identities() -> Outcome {
    let mut instances = vec![esempio()];
    instances.extend((0..1000).map(sweep_instance));
    let mut runs = 0;
    for (i, ks) in instances.iter().enumerate() {
        for (name, res) in [
            ("sa", compute(ks, Algorithm::Sa, &RunOptions::default()).unwrap()),
            ("basic", compute(ks, Algorithm::Basic, &RunOptions::default()).unwrap()),
            ("refined", compute(ks, Algorithm::Refined, &RunOptions::default()).unwrap()),
        ] {
            if let Err(e) = check_counters(&format!("instance {i} {name}"), ks, &res) {
                return Outcome::Fail(e);
            }
            runs += 1;
            if name == "sa" {
                let s = &res.stats;
                let bound = s.final_blocks + s.tail_moves + s.outer_iterations;
                if s.scan_skips > bound {
                    return Outcome::Fail(format!("instance {i}: {} scan skips exceed bound {bound}", s.scan_skips));
                }
            }
        }
        // The state-based algorithms assert their invariants internally.
        let checked = RefOptions { check_invariants: Some(true), ..RefOptions::default() };
        simshell_core::reference::hhk_with(ks, &checked);
        simshell_core::reference::refined_similarity_with(ks, &checked);
    }
    let mode = if cfg!(debug_assertions) {
        "with loop-head invariant checks"
    } else {
        "without debug invariant checks (release build)"
    };
    Outcome::Pass(format!("{runs} runs, identities hold, {mode}"))
}

struct TableRow {
    name: &'static str,
    states: usize,
    transitions: usize,
    p_in: usize,
    p_sim: usize,
}

const TABLE: [TableRow; 3] = [
    TableRow { name: "vasy_0_1", states: 1513, transitions: 2448, p_in: 3, p_sim: 21 },
    TableRow { name: "cwi_1_2", states: 4339, transitions: 4774, p_in: 27, p_sim: 2401 },
    TableRow { name: "vasy_1_4", states: 5647, transitions: 8928, p_in: 7, p_sim: 87 },
];

fn vlts_dir() -> PathBuf {
    std::env::var_os("SIMSHELL_VLTS_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/vlts"))
}

fn table_reproduction() -> Outcome {
    let dir = vlts_dir();
    let mut done = Vec::new();
    for row in &TABLE {
        let path = dir.join(format!("{}.aut", row.name));
        let Ok(text) = std::fs::read_to_string(&path) else { continue };
        let lts = match parse_aut(&text) {
            Ok(l) => l,
            Err(e) => return Outcome::Fail(format!("{}: {e}", row.name)),
        };
        let ks = lts_to_kripke(&lts).unwrap();
        let res = compute(&ks, Algorithm::Sa, &RunOptions::default()).unwrap();
        let got = (ks.num_states(), ks.num_transitions(), initial_partition(&ks).num_blocks(), res.num_blocks());
        let want = (row.states, row.transitions, row.p_in, row.p_sim);
        if got != want {
            return Outcome::Fail(format!("{}: got {got:?}, expected {want:?}", row.name));
        }
        done.push(format!("{} {}/{}/{}/{}", row.name, got.0, got.1, got.2, got.3));
    }
    if done.is_empty() {
        return Outcome::Skip(format!("no model files in {}", dir.display()));
    }
    Outcome::Pass(done.join(", "))
}

fn timed(mut f: impl FnMut(), reps: usize) -> f64 {
    (0..reps)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

fn scaling() -> Outcome {
    let sizes = [(1000usize, 12.5f64), (1414, 17.68), (2000, 25.0), (2828, 35.36), (4000, 50.0)];
    let groups = 8;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut last = None;
    let mut psim = Vec::new();
    for &(n, d) in &sizes {
        let ks = generate_layered(&LayeredSpec { num_states: n, groups, out_degree: d, seed: n as u64 }).unwrap();
        let mut blocks = 0;
        let t = timed(
            || blocks = compute(&ks, Algorithm::Sa, &RunOptions::default()).unwrap().num_blocks(),
            3,
        );
        psim.push(blocks);
        xs.push((ks.num_transitions() as f64).ln());
        ys.push(t.ln());
        last = Some((ks, t));
    }
    let (ks, sa_time) = last.unwrap();
    let hhk_time = timed(|| drop(hhk(&ks, false)), 1);
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let detail = format!(
        "|Psim| per size {psim:?}, slope {slope:.3}, largest |->|={} sa {:.4}s hhk {:.4}s",
        ks.num_transitions(),
        sa_time,
        hhk_time
    );
    if slope > 1.4 {
        return Outcome::Fail(format!("slope above 1.4: {detail}"));
    }
    if sa_time >= hhk_time {
        return Outcome::Fail(format!("sa not faster than hhk: {detail}"));
    }
    Outcome::Pass(detail)
}

fn main() {
    let results = [
        criterion(1, "worked example exactness", worked_example),
        criterion(2, "statement-placement bug regression", bug_regression),
        criterion(3, "oracle sweep over 1000 random structures", oracle_sweep),
        criterion(4, "closure-theory checks on structured instances", shell_theory),
        criterion(5, "counter identities and invariant checks", counter_identities),
        criterion(6, "benchmark structural reproduction", table_reproduction),
        criterion(7, "scaling sanity", scaling),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} criteria, {failed} failed", results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
