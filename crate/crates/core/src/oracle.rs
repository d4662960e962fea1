//! Budgeted exact search for hamiltonian paths, cycles and disjoint path
//! covers, plus a pruning-free enumerator for tiny instances.
//!
//! Every search is a depth-first extension of a single path with three
//! prunes applied at each expansion:
//!
//! * an unvisited node other than the terminal that has at most one
//!   unvisited neighbor must be the next node (two such nodes, or one with
//!   none, is a dead end);
//! * the terminal must keep an unvisited neighbor while other nodes remain;
//! * the unvisited nodes must stay connected.
//!
//! Successors are tried lowest remaining degree first. The first attempt
//! breaks ties by node index; if it runs past a fixed expansion slice, the
//! search restarts with a doubled slice and a different fixed tie order.
//! Everything is a deterministic function of the inputs. Cycles and disjoint
//! path pairs reuse the path engine through a ghost node: a copy of the start
//! node for cycles, and a bridge `y1 -> ghost -> x2` whose orientation is
//! enforced by entry/exit constraints for path pairs.

use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::faults::SurvivingView;
use crate::topology::Node;

/// Expansion budget used when none is given.
pub const DEFAULT_MAX_EXPANSIONS: u64 = 5_000_000;

/// Largest instance [`enumerate_ham_path_exists`] accepts.
pub const ENUMERATION_LIMIT: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("instance of {0} nodes exceeds the enumeration limit")]
    TooLarge(usize),
    #[error("search budget must allow at least one expansion")]
    ZeroBudget,
}

/// Limits on a single oracle call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    max_expansions: u64,
    time_limit: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_expansions: DEFAULT_MAX_EXPANSIONS, time_limit: None }
    }
}

impl SearchBudget {
    pub fn new(max_expansions: u64) -> Result<Self, OracleError> {
        if max_expansions == 0 {
            return Err(OracleError::ZeroBudget);
        }
        Ok(SearchBudget { max_expansions, time_limit: None })
    }

    /// Adds a wall-clock limit. Searches that hit it report exhaustion, so
    /// results are then no longer reproducible.
    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn max_expansions(&self) -> u64 {
        self.max_expansions
    }

    pub fn time_limit(&self) -> Option<Duration> {
        self.time_limit
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SearchOutcome<T> {
    Found(T),
    ProvenAbsent,
    BudgetExhausted,
}

impl<T> SearchOutcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            SearchOutcome::Found(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    fn map<U>(self, f: impl FnOnce(T) -> U) -> SearchOutcome<U> {
        match self {
            SearchOutcome::Found(x) => SearchOutcome::Found(f(x)),
            SearchOutcome::ProvenAbsent => SearchOutcome::ProvenAbsent,
            SearchOutcome::BudgetExhausted => SearchOutcome::BudgetExhausted,
        }
    }
}

/// Outcome of one oracle call with the number of expansions it spent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Search<T> {
    pub outcome: SearchOutcome<T>,
    pub expansions: u64,
}

/// A cycle, possibly leaving one node out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearCycle {
    pub cycle: Vec<Node>,
    pub missed: Option<Node>,
}

/// An `s`-`t` path, possibly leaving one node out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearPath {
    pub path: Vec<Node>,
    pub missed: Option<Node>,
}

/// Two node-disjoint paths jointly covering the view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathPair {
    pub first: Vec<Node>,
    pub second: Vec<Node>,
}

const NONE: u32 = u32::MAX;

enum Step {
    Found,
    Dead,
    Exhausted,
}

/// A path search over local indices: from `start` to `end` through every
/// node, honoring the per-node entry/exit constraints.
struct Problem {
    adj: Vec<Vec<u32>>,
    entry_from: Vec<u32>,
    exit_to: Vec<u32>,
    start: u32,
    end: u32,
}

impl Problem {
    fn new(adj: Vec<Vec<u32>>, start: u32, end: u32) -> Self {
        let m = adj.len();
        Problem { adj, entry_from: vec![NONE; m], exit_to: vec![NONE; m], start, end }
    }

    /// The same search run from `end` back to `start`.
    fn reversed(&self) -> Problem {
        Problem {
            adj: self.adj.clone(),
            entry_from: self.exit_to.clone(),
            exit_to: self.entry_from.clone(),
            start: self.end,
            end: self.start,
        }
    }
}

/// Expansions allowed to the first attempt; each later attempt doubles it.
const FIRST_SLICE: u64 = 20_000;

/// Runs attempts with growing expansion slices, alternating between the
/// forward and the reversed search and breaking degree ties in a different
/// fixed order for each pair. The schedule does not depend on the total
/// budget, so a larger budget replays the same attempts. An attempt that
/// finishes inside its slice has explored the whole space.
fn solve_problem(p: &Problem, limit: u64, deadline: Option<Instant>) -> (SearchOutcome<Vec<u32>>, u64) {
    let back = p.reversed();
    let mut spent = 0;
    let mut slice = FIRST_SLICE;
    for attempt in 0u64.. {
        let reverse = attempt % 2 == 1;
        let problem = if reverse { &back } else { p };
        let this = slice.min(limit - spent);
        let mut engine = Engine::new(problem, attempt / 2, this, deadline);
        let outcome = engine.run(problem.start);
        spent += engine.expansions.min(this);
        match outcome {
            SearchOutcome::Found(()) => {
                let mut path = engine.path;
                if reverse {
                    path.reverse();
                }
                return (SearchOutcome::Found(path), spent);
            }
            SearchOutcome::ProvenAbsent => return (SearchOutcome::ProvenAbsent, spent),
            SearchOutcome::BudgetExhausted if engine.timed_out || spent >= limit => {
                return (SearchOutcome::BudgetExhausted, spent)
            }
            SearchOutcome::BudgetExhausted if reverse => slice = slice.saturating_mul(2),
            SearchOutcome::BudgetExhausted => {}
        }
    }
    unreachable!("the attempt loop only exits by returning")
}

fn mix(salt: u64, v: u32) -> u64 {
    if salt == 0 {
        return v as u64;
    }
    let mut z = salt.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (v as u64);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Engine {
    adj: Vec<Vec<u32>>,
    rank: Vec<u64>,
    timed_out: bool,
    entry_from: Vec<u32>,
    exit_to: Vec<u32>,
    end: u32,
    visited: Vec<bool>,
    free: Vec<u32>,
    path: Vec<u32>,
    remaining: usize,
    expansions: u64,
    limit: u64,
    deadline: Option<Instant>,
    mark: Vec<u32>,
    epoch: u32,
    queue: Vec<u32>,
}

impl Engine {
    fn new(p: &Problem, salt: u64, limit: u64, deadline: Option<Instant>) -> Self {
        let m = p.adj.len();
        let free = p.adj.iter().map(|a| a.len() as u32).collect();
        Engine {
            adj: p.adj.clone(),
            rank: (0..m as u32).map(|v| mix(salt, v)).collect(),
            timed_out: false,
            entry_from: p.entry_from.clone(),
            exit_to: p.exit_to.clone(),
            end: p.end,
            visited: vec![false; m],
            free,
            path: Vec::with_capacity(m),
            remaining: m,
            expansions: 0,
            limit,
            deadline,
            mark: vec![0; m],
            epoch: 0,
            queue: Vec::with_capacity(m),
        }
    }

    fn visit(&mut self, v: u32) {
        self.visited[v as usize] = true;
        self.remaining -= 1;
        self.path.push(v);
        for i in 0..self.adj[v as usize].len() {
            let w = self.adj[v as usize][i];
            self.free[w as usize] -= 1;
        }
    }

    fn unvisit(&mut self, v: u32) {
        self.visited[v as usize] = false;
        self.remaining += 1;
        self.path.pop();
        for i in 0..self.adj[v as usize].len() {
            let w = self.adj[v as usize][i];
            self.free[w as usize] += 1;
        }
    }

    fn allowed(&self, from: u32, to: u32) -> bool {
        let e = self.entry_from[to as usize];
        let x = self.exit_to[from as usize];
        (e == NONE || e == from) && (x == NONE || x == to)
    }

    /// Runs the search from `start`; the path ends up in `self.path`.
    fn run(&mut self, start: u32) -> SearchOutcome<()> {
        self.visit(start);
        if !self.initially_feasible(start) {
            return SearchOutcome::ProvenAbsent;
        }
        match self.extend() {
            Step::Found => SearchOutcome::Found(()),
            Step::Dead => SearchOutcome::ProvenAbsent,
            Step::Exhausted => SearchOutcome::BudgetExhausted,
        }
    }

    fn initially_feasible(&self, start: u32) -> bool {
        (0..self.adj.len() as u32).all(|w| {
            if self.visited[w as usize] || w == self.end {
                return true;
            }
            match self.free[w as usize] {
                0 => false,
                1 => self.adj[start as usize].contains(&w),
                _ => true,
            }
        })
    }

    fn extend(&mut self) -> Step {
        let head = *self.path.last().expect("path starts non-empty");
        if self.remaining == 0 {
            return if head == self.end { Step::Found } else { Step::Dead };
        }
        self.expansions += 1;
        if self.expansions > self.limit {
            return Step::Exhausted;
        }
        if self.expansions.is_multiple_of(4096) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.timed_out = true;
                    return Step::Exhausted;
                }
            }
        }

        let mut forced = NONE;
        for &w in &self.adj[head as usize] {
            if self.visited[w as usize] {
                continue;
            }
            if w == self.end {
                if self.free[w as usize] == 0 && self.remaining > 1 {
                    return Step::Dead;
                }
                continue;
            }
            match self.free[w as usize] {
                0 => return Step::Dead,
                1 if forced != NONE => return Step::Dead,
                1 => forced = w,
                _ => {}
            }
        }
        if !self.unvisited_connected() {
            return Step::Dead;
        }

        let mut candidates: Vec<u32> = if forced != NONE {
            if !self.allowed(head, forced) {
                return Step::Dead;
            }
            vec![forced]
        } else {
            self.adj[head as usize]
                .iter()
                .copied()
                .filter(|&w| {
                    !self.visited[w as usize] && (w != self.end || self.remaining == 1) && self.allowed(head, w)
                })
                .collect()
        };
        candidates.sort_by_key(|&w| (self.free[w as usize], self.rank[w as usize], w));

        for w in candidates {
            self.visit(w);
            match self.extend() {
                Step::Found => return Step::Found,
                Step::Exhausted => {
                    self.unvisit(w);
                    return Step::Exhausted;
                }
                Step::Dead => self.unvisit(w),
            }
        }
        Step::Dead
    }

    fn unvisited_connected(&mut self) -> bool {
        if self.remaining <= 1 {
            return true;
        }
        self.epoch += 1;
        let epoch = self.epoch;
        self.queue.clear();
        self.queue.push(self.end);
        self.mark[self.end as usize] = epoch;
        let mut reached = 1;
        let mut i = 0;
        while i < self.queue.len() {
            let u = self.queue[i];
            i += 1;
            for &w in &self.adj[u as usize] {
                if !self.visited[w as usize] && self.mark[w as usize] != epoch {
                    self.mark[w as usize] = epoch;
                    reached += 1;
                    self.queue.push(w);
                }
            }
        }
        reached == self.remaining
    }
}

fn local_adjacency(view: &SurvivingView) -> Vec<Vec<u32>> {
    view.nodes()
        .iter()
        .map(|&v| view.neighbors(v).iter().map(|&w| view.index_of(w).expect("neighbors are present") as u32).collect())
        .collect()
}

fn deadline(budget: &SearchBudget) -> Option<Instant> {
    budget.time_limit.map(|d| Instant::now() + d)
}

fn require(view: &SurvivingView, nodes: &[Node]) -> Result<Vec<u32>, OracleError> {
    let mut out = Vec::with_capacity(nodes.len());
    for (i, &v) in nodes.iter().enumerate() {
        let idx = view
            .index_of(v)
            .ok_or_else(|| OracleError::PreconditionViolated(format!("node {v} is faulty or absent")))?;
        if nodes[..i].contains(&v) {
            return Err(OracleError::PreconditionViolated(format!("node {v} given twice")));
        }
        out.push(idx as u32);
    }
    Ok(out)
}

/// Hamiltonian path of `view` from `s` to `t`.
pub fn ham_path(
    view: &SurvivingView,
    s: Node,
    t: Node,
    budget: &SearchBudget,
) -> Result<Search<Vec<Node>>, OracleError> {
    let ends = require(view, &[s, t])?;
    let problem = Problem::new(local_adjacency(view), ends[0], ends[1]);
    let (outcome, expansions) = solve_problem(&problem, budget.max_expansions, deadline(budget));
    let nodes = view.nodes();
    Ok(Search { outcome: outcome.map(|p| p.iter().map(|&i| nodes[i as usize]).collect()), expansions })
}

/// Hamiltonian cycle of `view`, starting at the lowest-degree node.
pub fn ham_cycle(view: &SurvivingView, budget: &SearchBudget) -> Search<Vec<Node>> {
    ham_cycle_limited(view, budget.max_expansions, deadline(budget))
}

fn ham_cycle_limited(view: &SurvivingView, limit: u64, deadline: Option<Instant>) -> Search<Vec<Node>> {
    let absent = Search { outcome: SearchOutcome::ProvenAbsent, expansions: 0 };
    let Some((delta, start)) = view.min_degree() else { return absent };
    if view.len() < 3 || delta < 2 {
        return absent;
    }
    let mut adj = local_adjacency(view);
    let a = view.index_of(start).expect("witness is present") as u32;
    let ghost = adj.len() as u32;
    let copy = adj[a as usize].clone();
    for &w in &copy {
        adj[w as usize].push(ghost);
    }
    adj.push(copy);
    let (outcome, expansions) = solve_problem(&Problem::new(adj, a, ghost), limit, deadline);
    let nodes = view.nodes();
    Search {
        outcome: outcome.map(|p| p.iter().filter(|&&i| i != ghost).map(|&i| nodes[i as usize]).collect()),
        expansions,
    }
}

/// Hamiltonian cycle when `δ ≥ 2`, otherwise (or when none exists) a cycle
/// missing exactly one node, preferring the minimum-degree witness.
pub fn near_ham_cycle(view: &SurvivingView, budget: &SearchBudget) -> Search<NearCycle> {
    let deadline = deadline(budget);
    let mut spent = 0;
    let low: Vec<Node> = view.nodes().iter().copied().filter(|&v| view.degree(v) <= 1).collect();
    let candidates: Vec<Node> = match low.len() {
        0 => {
            let s = ham_cycle_limited(view, budget.max_expansions, deadline);
            spent += s.expansions;
            match s.outcome {
                SearchOutcome::Found(cycle) => {
                    return Search {
                        outcome: SearchOutcome::Found(NearCycle { cycle, missed: None }),
                        expansions: spent,
                    }
                }
                SearchOutcome::BudgetExhausted => {
                    return Search { outcome: SearchOutcome::BudgetExhausted, expansions: spent }
                }
                SearchOutcome::ProvenAbsent => {}
            }
            let (_, witness) = view.min_degree().expect("view is non-empty");
            std::iter::once(witness).chain(view.nodes().iter().copied().filter(|&v| v != witness)).collect()
        }
        1 => low,
        _ => return Search { outcome: SearchOutcome::ProvenAbsent, expansions: 0 },
    };
    for q in candidates {
        let rest = view.without(&[q]);
        let s = ham_cycle_limited(&rest, budget.max_expansions - spent.min(budget.max_expansions), deadline);
        spent += s.expansions;
        match s.outcome {
            SearchOutcome::Found(cycle) => {
                return Search {
                    outcome: SearchOutcome::Found(NearCycle { cycle, missed: Some(q) }),
                    expansions: spent,
                }
            }
            SearchOutcome::BudgetExhausted => {
                return Search { outcome: SearchOutcome::BudgetExhausted, expansions: spent }
            }
            SearchOutcome::ProvenAbsent => {}
        }
    }
    Search { outcome: SearchOutcome::ProvenAbsent, expansions: spent }
}

/// Hamiltonian `s`-`t` path, or failing that a path missing exactly one
/// node other than `s` and `t`. A non-endpoint node of degree at most one
/// is the only possible miss; otherwise nodes are tried in index order.
pub fn near_ham_path(
    view: &SurvivingView,
    s: Node,
    t: Node,
    budget: &SearchBudget,
) -> Result<Search<NearPath>, OracleError> {
    let first = ham_path(view, s, t, budget)?;
    let mut spent = first.expansions;
    match first.outcome {
        SearchOutcome::Found(path) => {
            return Ok(Search { outcome: SearchOutcome::Found(NearPath { path, missed: None }), expansions: spent })
        }
        SearchOutcome::BudgetExhausted => {
            return Ok(Search { outcome: SearchOutcome::BudgetExhausted, expansions: spent })
        }
        SearchOutcome::ProvenAbsent => {}
    }
    let low: Vec<Node> = view.nodes().iter().copied().filter(|&v| v != s && v != t && view.degree(v) <= 1).collect();
    let candidates: Vec<Node> = match low.len() {
        0 => view.nodes().iter().copied().filter(|&v| v != s && v != t).collect(),
        1 => low,
        _ => return Ok(Search { outcome: SearchOutcome::ProvenAbsent, expansions: spent }),
    };
    for q in candidates {
        let left = budget.max_expansions.saturating_sub(spent);
        if left == 0 {
            return Ok(Search { outcome: SearchOutcome::BudgetExhausted, expansions: spent });
        }
        let sub = SearchBudget { max_expansions: left, time_limit: budget.time_limit };
        let r = ham_path(&view.without(&[q]), s, t, &sub)?;
        spent += r.expansions;
        match r.outcome {
            SearchOutcome::Found(path) => {
                return Ok(Search {
                    outcome: SearchOutcome::Found(NearPath { path, missed: Some(q) }),
                    expansions: spent,
                })
            }
            SearchOutcome::BudgetExhausted => {
                return Ok(Search { outcome: SearchOutcome::BudgetExhausted, expansions: spent })
            }
            SearchOutcome::ProvenAbsent => {}
        }
    }
    Ok(Search { outcome: SearchOutcome::ProvenAbsent, expansions: spent })
}

/// Node-disjoint paths `x1 - y1` and `x2 - y2` covering every node of `view`.
pub fn two_disjoint_spanning_paths(
    view: &SurvivingView,
    x1: Node,
    y1: Node,
    x2: Node,
    y2: Node,
    budget: &SearchBudget,
) -> Result<Search<PathPair>, OracleError> {
    let ix = require(view, &[x1, y1, x2, y2])?;
    let (a, b, c, d) = (ix[0], ix[1], ix[2], ix[3]);
    let mut adj = local_adjacency(view);
    let ghost = adj.len() as u32;
    adj[b as usize].push(ghost);
    adj[c as usize].push(ghost);
    adj.push(vec![b, c]);
    let mut problem = Problem::new(adj, a, d);
    problem.entry_from[ghost as usize] = b;
    problem.exit_to[b as usize] = ghost;
    problem.entry_from[c as usize] = ghost;
    let (outcome, expansions) = solve_problem(&problem, budget.max_expansions, deadline(budget));
    let nodes = view.nodes();
    Ok(Search {
        outcome: outcome.map(|p| {
            let cut = p.iter().position(|&i| i == ghost).expect("bridge is on the path");
            PathPair {
                first: p[..cut].iter().map(|&i| nodes[i as usize]).collect(),
                second: p[cut + 1..].iter().map(|&i| nodes[i as usize]).collect(),
            }
        }),
        expansions,
    })
}

/// Exact answer by plain depth-first enumeration of simple paths from `s`.
pub fn enumerate_ham_path_exists(view: &SurvivingView, s: Node, t: Node) -> Result<bool, OracleError> {
    if view.len() > ENUMERATION_LIMIT {
        return Err(OracleError::TooLarge(view.len()));
    }
    let ends = require(view, &[s, t])?;
    let adj = local_adjacency(view);
    let mut visited = vec![false; adj.len()];
    visited[ends[0] as usize] = true;
    Ok(enumerate(&adj, &mut visited, ends[0], ends[1], 1))
}

fn enumerate(adj: &[Vec<u32>], visited: &mut [bool], head: u32, end: u32, count: usize) -> bool {
    if head == end {
        return count == adj.len();
    }
    for &w in &adj[head as usize] {
        if !visited[w as usize] {
            visited[w as usize] = true;
            let hit = enumerate(adj, visited, w, end, count + 1);
            visited[w as usize] = false;
            if hit {
                return true;
            }
        }
    }
    false
}
