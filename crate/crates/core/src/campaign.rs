//! Seeded experiment campaigns: embedder stress trials and the search and
//! topology check suites.
//!
//! Every trial draws from its own ChaCha stream keyed by the campaign seed
//! and the trial index, so trials run in parallel and reports come out the
//! same whatever the scheduling. Wall-clock times are carried alongside the
//! reports but never serialized into their JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::embed::{embed_with, EmbedOptions};
use crate::faults::{neighbor_condition, FaultElement, FaultSet, SurvivingView};
use crate::oracle::{self, SearchBudget, SearchOutcome};
use crate::topology::{check_shape, make_preset, Graph, Node, ThlnGraph, VariantSpec};
use crate::validate::{classify_cycle, classify_path, PathClass};

/// Endpoint draws attempted before a trial gives up.
pub const ENDPOINT_ATTEMPTS: usize = 10_000;

/// Generator for trial `index` of a campaign seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `count` distinct faults, each a node or an edge with equal odds.
/// Edge faults may touch faulty nodes.
pub fn sample_faults(g: &Graph, count: usize, rng: &mut impl Rng) -> FaultSet {
    let size = g.node_count();
    let total = size + g.edge_count();
    let mut f = FaultSet::new();
    while f.len() < count.min(total) {
        let v = rng.gen_range(0..size) as Node;
        if rng.gen_bool(0.5) {
            f.add_node(v);
        } else {
            let w = *g.neighbors(v).choose(rng).expect("graph has edges");
            f.add_edge(v, w);
        }
    }
    f
}

/// Uniform fault-free pair satisfying the neighbor condition, by rejection.
pub fn sample_endpoints(view: &SurvivingView, rng: &mut impl Rng) -> Option<(Node, Node)> {
    let nodes = view.nodes();
    if nodes.len() < 2 {
        return None;
    }
    for _ in 0..ENDPOINT_ATTEMPTS {
        let s = *nodes.choose(rng)?;
        let t = *nodes.choose(rng)?;
        if s != t && neighbor_condition(view, s, t) == Ok(true) {
            return Some((s, t));
        }
    }
    None
}

// ---- stress ------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct StressConfig {
    pub dimension: u32,
    pub faults: usize,
    pub trials: u64,
    pub seed: u64,
    /// Fixed family for every trial; `None` draws a fresh random THLN per trial.
    pub variant: Option<VariantSpec>,
    pub options: EmbedOptions,
}

impl StressConfig {
    pub fn new(dimension: u32, faults: usize, trials: u64, seed: u64) -> Self {
        StressConfig { dimension, faults, trials, seed, variant: None, options: EmbedOptions::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub index: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph_seed: Option<u64>,
    pub s: Option<Node>,
    pub t: Option<Node>,
    pub faults: Vec<FaultElement>,
    /// Result status, or the error kind.
    pub status: String,
    pub ok: bool,
    /// Case label of each recursion level, outermost first.
    pub cases: Vec<String>,
    pub missed: Option<Node>,
    pub path_len: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Serialize)]
pub struct StressReport {
    pub dimension: u32,
    pub faults: usize,
    pub seed: u64,
    pub trials: u64,
    pub successes: u64,
    pub failures: Vec<u64>,
    pub near_hamiltonian: u64,
    /// Outermost case label per trial.
    pub top_cases: BTreeMap<String, u64>,
    /// Case labels over all recursion levels.
    pub level_cases: BTreeMap<String, u64>,
    /// How often each node was the missed one.
    pub missed: BTreeMap<Node, u64>,
    pub records: Vec<TrialRecord>,
}

/// Latency percentiles of a stress run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Latency {
    pub p50: Duration,
    pub p90: Duration,
    pub p99: Duration,
    pub max: Duration,
}

impl StressReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Deterministic JSON, newline-terminated.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize") + "\n"
    }

    pub fn latency(&self) -> Option<Latency> {
        let mut times: Vec<Duration> = self.records.iter().map(|r| r.elapsed).collect();
        if times.is_empty() {
            return None;
        }
        times.sort();
        let at = |q: f64| times[((times.len() - 1) as f64 * q).round() as usize];
        Some(Latency { p50: at(0.5), p90: at(0.9), p99: at(0.99), max: *times.last()? })
    }

    /// One row per trial; the `micros` column varies between runs.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,s,t,faults,status,ok,top_case,levels,missed,path_len,micros\n");
        let opt = |v: Option<Node>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.index,
                opt(r.s),
                opt(r.t),
                r.faults.len(),
                r.status,
                r.ok,
                r.cases.first().map(String::as_str).unwrap_or(""),
                r.cases.join(" "),
                opt(r.missed),
                r.path_len,
                r.elapsed.as_micros(),
            );
        }
        out
    }
}

pub fn run_trial(config: &StressConfig, index: u64) -> TrialRecord {
    let start = Instant::now();
    let mut rng = trial_rng(config.seed, index);
    let (graph_seed, spec) = match &config.variant {
        Some(spec) => (None, spec.clone()),
        None => {
            let seed = rng.gen();
            (Some(seed), VariantSpec::Random(seed))
        }
    };
    let mut record = TrialRecord {
        index,
        graph_seed,
        s: None,
        t: None,
        faults: Vec::new(),
        status: String::new(),
        ok: false,
        cases: Vec::new(),
        missed: None,
        path_len: 0,
        elapsed: Duration::ZERO,
    };
    let g = match make_preset(&spec, config.dimension) {
        Ok(g) => g,
        Err(e) => {
            record.status = format!("bad-graph: {e}");
            return record;
        }
    };
    let f = sample_faults(&g, config.faults, &mut rng);
    record.faults = f.elements().collect();
    let view = SurvivingView::new(&g, &f).expect("sampled faults lie in the graph");
    let Some((s, t)) = sample_endpoints(&view, &mut rng) else {
        record.status = "no-endpoints".into();
        record.elapsed = start.elapsed();
        return record;
    };
    record.s = Some(s);
    record.t = Some(t);
    match embed_with(&g, &f, s, t, &config.options) {
        Ok(r) => {
            let class = classify_path(&view, s, t, &r.path);
            record.ok = class == r.class && class.is_valid();
            record.status = match (r.in_contract, &class) {
                (false, _) => "out-of-contract".into(),
                (true, PathClass::NearHamiltonian { .. }) => "near-hamiltonian".into(),
                (true, PathClass::Hamiltonian) => "hamiltonian".into(),
                (true, other) => format!("invalid: {other}"),
            };
            record.cases = r.levels().filter_map(|l| l.case.clone()).collect();
            record.missed = r.missed();
            record.path_len = r.path.len();
        }
        Err(e) => record.status = e.kind().into(),
    }
    record.elapsed = start.elapsed();
    record
}

/// Runs all trials in parallel and tabulates them in index order.
pub fn stress(config: &StressConfig) -> StressReport {
    let records: Vec<TrialRecord> = (0..config.trials).into_par_iter().map(|i| run_trial(config, i)).collect();
    let mut report = StressReport {
        dimension: config.dimension,
        faults: config.faults,
        seed: config.seed,
        trials: config.trials,
        successes: 0,
        failures: Vec::new(),
        near_hamiltonian: 0,
        top_cases: BTreeMap::new(),
        level_cases: BTreeMap::new(),
        missed: BTreeMap::new(),
        records,
    };
    for r in &report.records {
        if r.ok {
            report.successes += 1;
        } else {
            report.failures.push(r.index);
        }
        if let Some(top) = r.cases.first() {
            *report.top_cases.entry(top.clone()).or_default() += 1;
        }
        for c in &r.cases {
            *report.level_cases.entry(c.clone()).or_default() += 1;
        }
        if let Some(q) = r.missed {
            report.near_hamiltonian += 1;
            *report.missed.entry(q).or_default() += 1;
        }
    }
    report
}

// ---- check suites ------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct CheckConfig {
    pub seed: u64,
    pub budget: SearchBudget,
    /// Drop one edge from every swept graph after it is built.
    pub mutant: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { seed: 1, budget: SearchBudget::default(), mutant: false }
    }
}

/// Outcome of one suite: `passed` of `trials` instances met expectations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub trials: usize,
    pub passed: usize,
    /// First failing instance, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl SuiteResult {
    pub fn ok(&self) -> bool {
        self.passed == self.trials
    }

    fn tally(name: &'static str, outcomes: Vec<Result<(), String>>) -> Self {
        let trials = outcomes.len();
        let passed = outcomes.iter().filter(|o| o.is_ok()).count();
        let failure = outcomes.into_iter().find_map(Result::err);
        SuiteResult { name, trials, passed, failure }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::ok)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize") + "\n"
    }
}

/// A named suite runner, so callers can time or select suites.
pub type Suite = (&'static str, fn(&CheckConfig) -> SuiteResult);

/// The default suites in report order.
pub const SUITES: [Suite; 7] = [
    ("topology-sweep", topology_sweep),
    ("oracle-vs-enumeration", oracle_agreement),
    ("ham-path-n5", ham_path_n5),
    ("ham-cycle-n4", ham_cycle_n4),
    ("ham-cycle-n7", ham_cycle_n7),
    ("path-pairs-n4", path_pairs_n4),
    ("path-pairs-n5", path_pairs_n5),
];

pub fn check(config: &CheckConfig) -> CheckReport {
    CheckReport { seed: config.seed, suites: SUITES.iter().map(|(_, run)| run(config)).collect() }
}

fn suite_rng(config: &CheckConfig, suite: u64, index: usize) -> ChaCha8Rng {
    trial_rng(config.seed, (suite << 32) | index as u64)
}

fn random_graph(rng: &mut ChaCha8Rng, n: u32) -> ThlnGraph {
    make_preset(&VariantSpec::Random(rng.gen()), n).expect("random family exists at every dimension")
}

/// Structural counts of one graph: nodes, edges, top-level cross edges and
/// regularity, plus every recursive shape check.
pub fn shape_counts_hold(g: &ThlnGraph) -> Result<(), String> {
    let n = g.dimension();
    let report = check_shape(g);
    if let Some(c) = report.failures().next() {
        return Err(format!("{}: {}", c.name, c.detail));
    }
    if g.node_count() != 1 << n {
        return Err(format!("{} nodes at n = {n}", g.node_count()));
    }
    if g.edge_count() != n as usize * (1 << (n - 1)) {
        return Err(format!("{} edges at n = {n}", g.edge_count()));
    }
    if let Some(v) = (0..g.node_count() as Node).find(|&v| g.degree(v) != n as usize) {
        return Err(format!("node {v} has degree {}", g.degree(v)));
    }
    if let Ok(cross) = g.cross_edges() {
        if cross.len() != 1 << (n - 1) || cross.iter().any(|&(u, v)| !g.has_edge(u, v)) {
            return Err(format!("{} cross edges at n = {n}", cross.len()));
        }
    }
    Ok(())
}

/// Random THLNs at `n = 3..=10` with five seeds each, plus every fixed
/// family at the same dimensions.
pub fn topology_sweep(config: &CheckConfig) -> SuiteResult {
    let mut jobs: Vec<(u32, VariantSpec)> = Vec::new();
    for n in 3..=10 {
        for i in 0..5 {
            jobs.push((n, VariantSpec::Random(config.seed.wrapping_mul(1000).wrapping_add(i))));
        }
        for spec in [
            VariantSpec::Base3Default,
            VariantSpec::Crossed,
            VariantSpec::Mobius0,
            VariantSpec::Mobius1,
            VariantSpec::LocallyTwisted,
        ] {
            jobs.push((n, spec));
        }
    }
    let outcomes = jobs
        .par_iter()
        .map(|(n, spec)| {
            let g = make_preset(spec, *n).map_err(|e| format!("{spec:?} n={n}: {e}"))?;
            let g = if config.mutant { drop_first_edge(&g) } else { g };
            shape_counts_hold(&g).map_err(|e| format!("{spec:?} n={n}: {e}"))
        })
        .collect();
    SuiteResult::tally("topology-sweep", outcomes)
}

/// `g` with its lowest edge removed and the decomposition kept.
pub fn drop_first_edge(g: &ThlnGraph) -> ThlnGraph {
    let mut doc = g.to_document();
    doc.edges.remove(0);
    ThlnGraph::from_document_unchecked(&doc).expect("edge removal keeps the document loadable")
}

/// Search and exhaustive enumeration agree on 1000 small sub-instances of
/// 4-dimensional THLNs with at most ten surviving nodes.
pub fn oracle_agreement(config: &CheckConfig) -> SuiteResult {
    let outcomes = (0..1000)
        .into_par_iter()
        .map(|i| {
            let mut rng = suite_rng(config, 1, i);
            let g = random_graph(&mut rng, 4);
            let keep = rng.gen_range(2..=10);
            let mut order: Vec<Node> = (0..16).collect();
            order.shuffle(&mut rng);
            let mut f = FaultSet::from_parts(order[keep..].iter().copied(), []);
            for _ in 0..rng.gen_range(0..=4) {
                let v = order[rng.gen_range(0..keep)];
                let w = *g.neighbors(v).choose(&mut rng).expect("degree 4");
                f.add_edge(v, w);
            }
            let view = SurvivingView::new(&g, &f).expect("faults lie in the graph");
            let (s, t) = (order[0], order[1]);
            let exact = oracle::enumerate_ham_path_exists(&view, s, t).map_err(|e| e.to_string())?;
            let found = oracle::ham_path(&view, s, t, &config.budget).map_err(|e| e.to_string())?;
            let searched = match found.outcome {
                SearchOutcome::Found(p) => {
                    if classify_path(&view, s, t, &p) != PathClass::Hamiltonian {
                        return Err(format!("instance {i}: found path does not validate"));
                    }
                    true
                }
                SearchOutcome::ProvenAbsent => false,
                SearchOutcome::BudgetExhausted => return Err(format!("instance {i}: budget exhausted")),
            };
            if searched == exact {
                Ok(())
            } else {
                Err(format!("instance {i}: search says {searched}, enumeration says {exact}"))
            }
        })
        .collect();
    SuiteResult::tally("oracle-vs-enumeration", outcomes)
}

/// Hamiltonian paths between random fault-free pairs of 5-dimensional
/// THLNs with `n - 3 = 2` faults.
pub fn ham_path_n5(config: &CheckConfig) -> SuiteResult {
    let outcomes = (0..500)
        .into_par_iter()
        .map(|i| {
            let mut rng = suite_rng(config, 2, i);
            let g = random_graph(&mut rng, 5);
            let f = sample_faults(&g, 2, &mut rng);
            let view = SurvivingView::new(&g, &f).expect("faults lie in the graph");
            let nodes = view.nodes();
            let s = *nodes.choose(&mut rng).expect("nodes survive");
            let t = loop {
                let t = *nodes.choose(&mut rng).expect("nodes survive");
                if t != s {
                    break t;
                }
            };
            let r = oracle::ham_path(&view, s, t, &config.budget).map_err(|e| e.to_string())?;
            match r.outcome {
                SearchOutcome::Found(p) if classify_path(&view, s, t, &p) == PathClass::Hamiltonian => Ok(()),
                other => Err(format!("trial {i} ({s}, {t}): {}", describe(&other))),
            }
        })
        .collect();
    SuiteResult::tally("ham-path-n5", outcomes)
}

/// Hamiltonian cycles of 4-dimensional THLNs with `n - 2 = 2` faults.
pub fn ham_cycle_n4(config: &CheckConfig) -> SuiteResult {
    let outcomes = (0..200)
        .into_par_iter()
        .map(|i| {
            let mut rng = suite_rng(config, 3, i);
            let g = random_graph(&mut rng, 4);
            let f = sample_faults(&g, 2, &mut rng);
            cycle_found(&g, &f, &config.budget).map_err(|e| format!("trial {i}: {e}"))
        })
        .collect();
    SuiteResult::tally("ham-cycle-n4", outcomes)
}

/// Hamiltonian cycles of 7-dimensional THLNs with `2n - 9 = 5` faults and
/// minimum degree at least two; fault sets are redrawn until the degree
/// condition holds.
pub fn ham_cycle_n7(config: &CheckConfig) -> SuiteResult {
    let outcomes = (0..50)
        .into_par_iter()
        .map(|i| {
            let mut rng = suite_rng(config, 4, i);
            let g = random_graph(&mut rng, 7);
            let f = loop {
                let f = sample_faults(&g, 5, &mut rng);
                let view = SurvivingView::new(&g, &f).expect("faults lie in the graph");
                if view.min_degree().is_some_and(|(d, _)| d >= 2) {
                    break f;
                }
            };
            cycle_found(&g, &f, &config.budget).map_err(|e| format!("trial {i}: {e}"))
        })
        .collect();
    SuiteResult::tally("ham-cycle-n7", outcomes)
}

fn cycle_found(g: &ThlnGraph, f: &FaultSet, budget: &SearchBudget) -> Result<(), String> {
    let view = SurvivingView::new(g, f).expect("faults lie in the graph");
    match oracle::ham_cycle(&view, budget).outcome {
        SearchOutcome::Found(c) if classify_cycle(&view, &c) == PathClass::Hamiltonian => Ok(()),
        other => Err(describe(&other).to_string()),
    }
}

/// Two disjoint paths covering a fault-free 4-dimensional THLN.
pub fn path_pairs_n4(config: &CheckConfig) -> SuiteResult {
    path_pairs(config, "path-pairs-n4", 5, 4, 0, 100)
}

/// Two disjoint covering paths of 5-dimensional THLNs with one fault.
pub fn path_pairs_n5(config: &CheckConfig) -> SuiteResult {
    path_pairs(config, "path-pairs-n5", 6, 5, 1, 200)
}

fn path_pairs(
    config: &CheckConfig,
    name: &'static str,
    suite: u64,
    n: u32,
    faults: usize,
    draws: usize,
) -> SuiteResult {
    let outcomes = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = suite_rng(config, suite, i);
            let g = random_graph(&mut rng, n);
            let f = sample_faults(&g, faults, &mut rng);
            let view = SurvivingView::new(&g, &f).expect("faults lie in the graph");
            let ends: Vec<Node> = view.nodes().choose_multiple(&mut rng, 4).copied().collect();
            let (x1, y1, x2, y2) = (ends[0], ends[1], ends[2], ends[3]);
            let r = oracle::two_disjoint_spanning_paths(&view, x1, y1, x2, y2, &config.budget)
                .map_err(|e| e.to_string())?;
            match r.outcome {
                SearchOutcome::Found(pair) => {
                    let mut covered: Vec<Node> = pair.first.iter().chain(&pair.second).copied().collect();
                    covered.sort_unstable();
                    covered.dedup();
                    let ends_ok = pair.first.first() == Some(&x1)
                        && pair.first.last() == Some(&y1)
                        && pair.second.first() == Some(&x2)
                        && pair.second.last() == Some(&y2);
                    let walks =
                        [&pair.first, &pair.second].iter().all(|p| p.windows(2).all(|w| view.has_edge(w[0], w[1])));
                    let disjoint = covered.len() == pair.first.len() + pair.second.len();
                    if ends_ok && walks && disjoint && covered == view.nodes() {
                        Ok(())
                    } else {
                        Err(format!("draw {i}: pair does not validate"))
                    }
                }
                other => Err(format!("draw {i} ({x1}, {y1}, {x2}, {y2}): {}", describe(&other))),
            }
        })
        .collect();
    SuiteResult::tally(name, outcomes)
}

fn describe<T>(outcome: &SearchOutcome<T>) -> &'static str {
    match outcome {
        SearchOutcome::Found(_) => "found result does not validate",
        SearchOutcome::ProvenAbsent => "proven absent",
        SearchOutcome::BudgetExhausted => "budget exhausted",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trial_streams_differ_and_repeat() {
        let a: u64 = trial_rng(1, 0).gen();
        let b: u64 = trial_rng(1, 1).gen();
        assert_ne!(a, b);
        assert_eq!(a, trial_rng(1, 0).gen::<u64>());
    }

    #[test]
    fn sampled_faults_have_requested_size() {
        let g = make_preset(&VariantSpec::Random(2), 5).unwrap();
        let mut rng = trial_rng(3, 0);
        for k in [0, 1, 6, 20] {
            let f = sample_faults(&g, k, &mut rng);
            assert_eq!(f.len(), k);
            assert!(f.check_against(&g).is_ok());
        }
    }

    #[test]
    fn endpoints_meet_the_neighbor_condition() {
        let g = make_preset(&VariantSpec::Random(2), 4).unwrap();
        let f = FaultSet::from_parts([1, 2, 3], []);
        let view = SurvivingView::new(&g, &f).unwrap();
        let mut rng = trial_rng(0, 0);
        for _ in 0..50 {
            let (s, t) = sample_endpoints(&view, &mut rng).unwrap();
            assert!(s != t && neighbor_condition(&view, s, t).unwrap());
        }
    }

    #[test]
    fn empty_stress_run() {
        let r = stress(&StressConfig::new(8, 6, 0, 1));
        assert_eq!((r.trials, r.successes), (0, 0));
        assert!(r.all_passed() && r.latency().is_none());
    }

    #[test]
    fn small_stress_run_is_reproducible() {
        let c = StressConfig::new(8, 6, 6, 9);
        let a = stress(&c);
        assert_eq!(a.successes, 6);
        assert_eq!(a.to_json(), stress(&c).to_json());
        assert_eq!(a.to_csv().lines().count(), 7);
    }

    #[test]
    fn mutant_fails_the_sweep() {
        let g = make_preset(&VariantSpec::Random(4), 5).unwrap();
        assert!(shape_counts_hold(&g).is_ok());
        let m = drop_first_edge(&g);
        assert!(check_shape(&m).failed("regularity"));
        assert!(shape_counts_hold(&m).is_err());
    }
}
