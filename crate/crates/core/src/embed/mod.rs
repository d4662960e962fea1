//! Constructive fault-tolerant embedding of hamiltonian and near-hamiltonian
//! paths.
//!
//! [`embed`] runs the inductive construction level by level: at each
//! decomposition level the halves are ordered so that half 1 carries at
//! least as many faults, one of five cases is chosen from half 1's fault
//! count and minimum degree, and the case splices sub-paths obtained from a
//! recursive call on half 1 and from oracle searches. Below
//! [`BASE_DIMENSION`] + 1 the oracle solves the instance directly.
//!
//! Every "pick one" step takes the first candidate in path order, then node
//! order, so results and traces are reproducible. Each level's output is
//! re-validated before it is handed upward.

mod case1;
mod cycle_cases;
mod path_cases;
mod splice;

use serde::Serialize;
use thiserror::Error;

use crate::faults::{neighbor_condition, partition_block, FaultElement, FaultSet, SurvivingView};
use crate::oracle::{self, NearCycle, PathPair, SearchBudget, SearchOutcome};
use crate::topology::{Block, Decomposition, Node, ThlnGraph};
use crate::validate::{classify_path, PathClass};

pub use splice::{open_cycle, orient, reversed, rotate, select_cross_edge, splice, SpliceError};

/// Largest dimension solved directly by search.
pub const BASE_DIMENSION: u32 = 7;

/// Smallest dimension accepted by [`embed`].
pub const MIN_DIMENSION: u32 = 7;

/// The fault budget `2n - 10` of an `n`-dimensional instance.
pub fn fault_bound(n: u32) -> usize {
    (2 * n as usize).saturating_sub(10)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("oracle search budget exhausted")]
    OracleBudgetExhausted { trace: Vec<TraceRecord> },
    #[error("internal contradiction: {reason}")]
    InternalContradiction { reason: String, trace: Vec<TraceRecord> },
    #[error("no hamiltonian or near-hamiltonian path exists")]
    NoPath { trace: Vec<TraceRecord> },
}

impl EmbedError {
    pub fn trace(&self) -> &[TraceRecord] {
        match self {
            EmbedError::PreconditionViolated(_) => &[],
            EmbedError::OracleBudgetExhausted { trace }
            | EmbedError::InternalContradiction { trace, .. }
            | EmbedError::NoPath { trace } => trace,
        }
    }

    /// Short machine-readable kind used in result documents.
    pub fn kind(&self) -> &'static str {
        match self {
            EmbedError::PreconditionViolated(_) => "precondition-violated",
            EmbedError::OracleBudgetExhausted { .. } => "budget-exhausted",
            EmbedError::InternalContradiction { .. } => "internal-contradiction",
            EmbedError::NoPath { .. } => "no-path",
        }
    }

    /// Result document with status `error`, newline-terminated.
    pub fn to_json(&self) -> String {
        let doc = ResultDocument {
            status: "error",
            classification: None,
            error: Some(self.kind()),
            reason: Some(self.to_string()),
            path: &[],
            missed: None,
            trace: self.trace(),
        };
        serde_json::to_string(&doc).expect("result documents serialize") + "\n"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordKind {
    Level,
    Lemma,
}

/// An endpoint replaced by a neighbor for part of the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Agent {
    pub endpoint: Node,
    pub agent: Node,
}

/// One recursion level or one oracle call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub kind: RecordKind,
    pub dim: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f1: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f2: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fc: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub swapped: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cross_edges: Vec<[Node; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault_element: Option<FaultElement>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub agents: Vec<Agent>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expansions: Option<u64>,
}

impl TraceRecord {
    fn new(kind: RecordKind, dim: u32) -> Self {
        TraceRecord {
            kind,
            dim,
            case: None,
            lemma: None,
            f1: None,
            f2: None,
            fc: None,
            delta: None,
            swapped: None,
            cross_edges: Vec::new(),
            fault_element: None,
            agents: Vec::new(),
            notes: Vec::new(),
            expansions: None,
        }
    }

    /// Top-level case number of a level record (`"2.1.3"` gives 2).
    pub fn top_case(&self) -> Option<u32> {
        self.case.as_deref()?.split('.').next()?.parse().ok()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EmbedOptions {
    pub budget: SearchBudget,
    /// Accept more faults than the theorem allows; such results are
    /// reported as out of contract.
    pub allow_out_of_contract: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedResult {
    pub path: Vec<Node>,
    /// Always hamiltonian or near-hamiltonian.
    pub class: PathClass,
    pub trace: Vec<TraceRecord>,
    pub in_contract: bool,
}

impl EmbedResult {
    pub fn missed(&self) -> Option<Node> {
        match self.class {
            PathClass::NearHamiltonian { missed } => Some(missed),
            _ => None,
        }
    }

    /// Level records only, outermost first.
    pub fn levels(&self) -> impl Iterator<Item = &TraceRecord> {
        self.trace.iter().filter(|r| r.kind == RecordKind::Level)
    }

    /// Case label of the outermost level.
    pub fn top_label(&self) -> Option<&str> {
        self.levels().next().and_then(|r| r.case.as_deref())
    }

    /// Compact result document, newline-terminated.
    pub fn to_json(&self) -> String {
        let class = match self.class {
            PathClass::NearHamiltonian { .. } => "near-hamiltonian",
            _ => "hamiltonian",
        };
        let doc = ResultDocument {
            status: if self.in_contract { class } else { "out-of-contract" },
            classification: (!self.in_contract).then_some(class),
            error: None,
            reason: None,
            path: &self.path,
            missed: self.missed(),
            trace: &self.trace,
        };
        serde_json::to_string(&doc).expect("result documents serialize") + "\n"
    }
}

#[derive(Serialize)]
struct ResultDocument<'a> {
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    path: &'a [Node],
    missed: Option<Node>,
    trace: &'a [TraceRecord],
}

/// Hamiltonian or near-hamiltonian `s`-`t` path of `g - f` under the
/// theorem's hypotheses.
pub fn embed(g: &ThlnGraph, f: &FaultSet, s: Node, t: Node, budget: SearchBudget) -> Result<EmbedResult, EmbedError> {
    embed_with(g, f, s, t, &EmbedOptions { budget, allow_out_of_contract: false })
}

pub fn embed_with(
    g: &ThlnGraph,
    f: &FaultSet,
    s: Node,
    t: Node,
    options: &EmbedOptions,
) -> Result<EmbedResult, EmbedError> {
    let pre = |m: String| EmbedError::PreconditionViolated(m);
    let n = g.dimension();
    if n < MIN_DIMENSION || g.decomposition().is_none() {
        return Err(pre(format!("dimension {n} is below {MIN_DIMENSION}")));
    }
    let mut embedder = Embedder::new(g, f, *options)?;
    let in_contract = f.len() <= fault_bound(n);
    if !in_contract && !options.allow_out_of_contract {
        return Err(pre(format!("fault bound: |F| = {} exceeds 2n-10 = {}", f.len(), fault_bound(n))));
    }
    match neighbor_condition(&embedder.full, s, t) {
        Ok(true) => {}
        Ok(false) => return Err(pre(format!("neighbor condition fails for {s}, {t}"))),
        Err(e) => return Err(pre(e.to_string())),
    }
    let path = embedder.solve(g.block(), s, t)?;
    let class = classify_path(&embedder.full, s, t, &path);
    if !class.is_valid() {
        return Err(embedder.contradiction(format!("final path is {class}")));
    }
    Ok(EmbedResult { path, class, trace: embedder.trace, in_contract })
}

/// One decomposition level as seen by the case solvers. Half 1 is the half
/// with more faults.
#[derive(Debug, Clone)]
pub struct Level<'a> {
    pub block: Block,
    pub half1: Block,
    pub half2: Block,
    pub swapped: bool,
    /// `G - F` restricted to the block.
    pub view: SurvivingView,
    pub view1: SurvivingView,
    pub view2: SurvivingView,
    pub f1: usize,
    pub f2: usize,
    pub fc_direct: usize,
    pub fc_effective: usize,
    /// Minimum degree of half 1 and the lowest node attaining it.
    pub delta1: usize,
    pub q1: Node,
    /// Faults inside half 1 in canonical order.
    pub f1_elements: Vec<FaultElement>,
    decomposition: &'a Decomposition,
}

impl Level<'_> {
    pub fn dimension(&self) -> u32 {
        self.block.dimension
    }

    pub fn partner(&self, v: Node) -> Node {
        self.decomposition.partner(v).expect("node lies in the level's block")
    }

    /// Whether `v`'s cross edge survives.
    pub fn live(&self, v: Node) -> bool {
        self.view.has_edge(v, self.partner(v))
    }

    pub fn in_half1(&self, v: Node) -> bool {
        self.half1.contains(v)
    }

    /// The case the dispatcher picks, or `None` when the level holds more
    /// faults than the construction handles.
    pub fn case(&self) -> Option<u32> {
        let k = self.block.dimension - 1;
        if self.f1 + self.f2 + self.fc_direct > fault_bound(self.block.dimension) {
            return None;
        }
        let low = self.delta1 <= 1;
        match self.f1 {
            f if f <= fault_bound(k) => Some(1),
            f if f == fault_bound(k) + 1 => Some(if low { 3 } else { 2 }),
            f if f == fault_bound(k) + 2 => Some(if low { 5 } else { 4 }),
            _ => None,
        }
    }
}

/// First neighbor of `a` in `view` other than `b`.
fn other_neighbor(view: &SurvivingView, a: Node, b: Node) -> Option<Node> {
    view.neighbors(a).iter().copied().find(|&w| w != b)
}

/// Recursive solver with its trace. Most callers want [`embed`]; the solver
/// is public so individual cases can be driven on hand-built levels.
pub struct Embedder<'a> {
    graph: &'a ThlnGraph,
    faults: &'a FaultSet,
    full: SurvivingView,
    options: EmbedOptions,
    trace: Vec<TraceRecord>,
    open: Vec<usize>,
}

impl<'a> Embedder<'a> {
    pub fn new(graph: &'a ThlnGraph, faults: &'a FaultSet, options: EmbedOptions) -> Result<Self, EmbedError> {
        let full = SurvivingView::new(graph, faults).map_err(|e| EmbedError::PreconditionViolated(e.to_string()))?;
        Ok(Embedder { graph, faults, full, options, trace: Vec::new(), open: Vec::new() })
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    pub fn surviving(&self) -> &SurvivingView {
        &self.full
    }

    /// Analysis of the level whose block is `block`.
    pub fn level(&self, block: Block) -> Result<Level<'a>, EmbedError> {
        let decomposition = self
            .graph
            .decomposition_at(block)
            .ok_or_else(|| EmbedError::PreconditionViolated(format!("no decomposition for block {block:?}")))?;
        let part = partition_block(self.graph, self.faults, block)
            .map_err(|e| EmbedError::PreconditionViolated(e.to_string()))?;
        let (h1, h2) = block.halves();
        let swapped = part.f2.len() > part.f1.len();
        let (half1, half2, f1, f2) = if swapped { (h2, h1, part.f2, part.f1) } else { (h1, h2, part.f1, part.f2) };
        let view = self.full.restrict(block);
        let view1 = view.restrict(half1);
        let view2 = view.restrict(half2);
        let (delta1, q1) = view1
            .min_degree()
            .ok_or_else(|| EmbedError::PreconditionViolated("half 1 has no surviving node".into()))?;
        Ok(Level {
            block,
            half1,
            half2,
            swapped,
            view,
            view1,
            view2,
            f1: f1.len(),
            f2: f2.len(),
            fc_direct: part.fc_direct.len(),
            fc_effective: part.fc_effective.len(),
            delta1,
            q1,
            f1_elements: f1.elements().collect(),
            decomposition,
        })
    }

    /// Path between `s` and `t` in the block, by case analysis above the
    /// base dimension and by search at or below it.
    pub fn solve(&mut self, block: Block, s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        if block.dimension <= BASE_DIMENSION {
            return self.solve_base(block, s, t);
        }
        let lvl = self.level(block)?;
        let case = lvl.case();
        self.solve_level(&lvl, case, s, t)
    }

    /// Runs the construction of `case` on `lvl` whatever the dispatcher
    /// would pick, with `None` searching the level directly. The output is
    /// validated like any other level's.
    pub fn solve_level(&mut self, lvl: &Level, case: Option<u32>, s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        let mut record = TraceRecord::new(RecordKind::Level, lvl.dimension());
        record.f1 = Some(lvl.f1);
        record.f2 = Some(lvl.f2);
        record.fc = Some(lvl.fc_effective);
        record.delta = Some(lvl.delta1);
        record.swapped = Some(lvl.swapped);
        self.trace.push(record);
        self.open.push(self.trace.len() - 1);
        let path = match case {
            Some(1) => self.solve_case1(lvl, s, t),
            Some(2) => self.solve_case2(lvl, s, t),
            Some(3) => self.solve_case3(lvl, s, t),
            Some(4) => self.solve_case4(lvl, s, t),
            Some(5) => self.solve_case5(lvl, s, t),
            _ => self.solve_direct(&lvl.view, s, t, "direct"),
        }?;
        let class = classify_path(&lvl.view, s, t, &path);
        if !class.is_valid() {
            let label = self.current_label();
            return Err(self.contradiction(format!("case {label} at dimension {} produced {class}", lvl.dimension())));
        }
        self.open.pop();
        Ok(path)
    }

    fn solve_base(&mut self, block: Block, s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        let view = self.full.restrict(block);
        let mut record = TraceRecord::new(RecordKind::Level, block.dimension);
        record.f1 = Some(self.faults.restricted(block).len());
        self.trace.push(record);
        self.open.push(self.trace.len() - 1);
        let path = self.solve_direct(&view, s, t, "base")?;
        self.open.pop();
        Ok(path)
    }

    fn solve_direct(&mut self, view: &SurvivingView, s: Node, t: Node, label: &str) -> Result<Vec<Node>, EmbedError> {
        self.label(label);
        let dim = self.current_dim();
        let found = oracle::near_ham_path(view, s, t, &self.options.budget)
            .map_err(|e| self.contradiction(format!("oracle rejected call: {e}")))?;
        self.push_lemma(dim, "ham-path", found.expansions);
        match found.outcome {
            SearchOutcome::Found(near) => {
                if let Some(q) = near.missed {
                    self.note(format!("no hamiltonian path; missed {q}"));
                }
                Ok(near.path)
            }
            SearchOutcome::BudgetExhausted => Err(self.exhausted()),
            SearchOutcome::ProvenAbsent if label == "direct" => Err(EmbedError::NoPath { trace: self.trace.clone() }),
            SearchOutcome::ProvenAbsent => Err(self.contradiction(format!("no path between {s} and {t} at the base"))),
        }
    }

    // ---- trace bookkeeping -------------------------------------------------

    fn current(&mut self) -> &mut TraceRecord {
        let i = *self.open.last().expect("a level is open");
        &mut self.trace[i]
    }

    fn current_dim(&self) -> u32 {
        self.open.last().map_or(0, |&i| self.trace[i].dim)
    }

    fn current_label(&self) -> String {
        self.open.last().and_then(|&i| self.trace[i].case.clone()).unwrap_or_default()
    }

    fn label(&mut self, case: &str) {
        self.current().case = Some(case.to_string());
    }

    /// Replaces the label set by a shared routine with `case`, keeping the
    /// routine's label as a note.
    fn relabel(&mut self, case: &str) {
        let inner = self.current_label();
        if !inner.is_empty() && inner != case {
            self.note(format!("as {inner}"));
        }
        self.label(case);
    }

    fn note(&mut self, text: String) {
        self.current().notes.push(text);
    }

    fn note_cross(&mut self, lvl: &Level, v: Node) {
        let p = lvl.partner(v);
        let pair = if lvl.in_half1(v) { [v, p] } else { [p, v] };
        self.current().cross_edges.push(pair);
    }

    fn note_agent(&mut self, endpoint: Node, agent: Node) {
        self.current().agents.push(Agent { endpoint, agent });
    }

    fn note_fault(&mut self, e: FaultElement) {
        self.current().fault_element = Some(e);
    }

    fn push_lemma(&mut self, dim: u32, name: &'static str, expansions: u64) {
        let mut r = TraceRecord::new(RecordKind::Lemma, dim);
        r.lemma = Some(name);
        r.expansions = Some(expansions);
        self.trace.push(r);
    }

    fn contradiction(&self, reason: String) -> EmbedError {
        EmbedError::InternalContradiction { reason, trace: self.trace.clone() }
    }

    fn exhausted(&self) -> EmbedError {
        EmbedError::OracleBudgetExhausted { trace: self.trace.clone() }
    }

    // ---- oracle calls --------------------------------------------------------

    fn lemma_path(&mut self, view: &SurvivingView, a: Node, b: Node) -> Result<Vec<Node>, EmbedError> {
        let dim = self.current_dim() - 1;
        let r = oracle::ham_path(view, a, b, &self.options.budget)
            .map_err(|e| self.contradiction(format!("hamiltonian path {a}..{b}: {e}")))?;
        self.push_lemma(dim, "ham-path", r.expansions);
        match r.outcome {
            SearchOutcome::Found(p) => Ok(p),
            SearchOutcome::BudgetExhausted => Err(self.exhausted()),
            SearchOutcome::ProvenAbsent => Err(self.contradiction(format!("no hamiltonian path {a}..{b} in a half"))),
        }
    }

    fn lemma_pair(
        &mut self,
        view: &SurvivingView,
        x1: Node,
        y1: Node,
        x2: Node,
        y2: Node,
    ) -> Result<PathPair, EmbedError> {
        let dim = self.current_dim() - 1;
        let r = oracle::two_disjoint_spanning_paths(view, x1, y1, x2, y2, &self.options.budget)
            .map_err(|e| self.contradiction(format!("disjoint paths {x1}..{y1}, {x2}..{y2}: {e}")))?;
        self.push_lemma(dim, "disjoint-paths", r.expansions);
        match r.outcome {
            SearchOutcome::Found(p) => Ok(p),
            SearchOutcome::BudgetExhausted => Err(self.exhausted()),
            SearchOutcome::ProvenAbsent => {
                Err(self.contradiction(format!("no disjoint spanning paths {x1}..{y1}, {x2}..{y2}")))
            }
        }
    }

    fn lemma_cycle(&mut self, view: &SurvivingView) -> Result<Vec<Node>, EmbedError> {
        let dim = self.current_dim() - 1;
        let r = oracle::ham_cycle(view, &self.options.budget);
        self.push_lemma(dim, "ham-cycle", r.expansions);
        match r.outcome {
            SearchOutcome::Found(c) => Ok(c),
            SearchOutcome::BudgetExhausted => Err(self.exhausted()),
            SearchOutcome::ProvenAbsent => Err(self.contradiction("no hamiltonian cycle in half 1".into())),
        }
    }

    fn lemma_near_cycle(&mut self, view: &SurvivingView) -> Result<NearCycle, EmbedError> {
        let dim = self.current_dim() - 1;
        let r = oracle::near_ham_cycle(view, &self.options.budget);
        self.push_lemma(dim, "near-ham-cycle", r.expansions);
        match r.outcome {
            SearchOutcome::Found(c) => Ok(c),
            SearchOutcome::BudgetExhausted => Err(self.exhausted()),
            SearchOutcome::ProvenAbsent => Err(self.contradiction("no near-hamiltonian cycle in half 1".into())),
        }
    }

    // ---- shared construction helpers -------------------------------------------

    fn join(&self, lvl: &Level, segments: &[&[Node]]) -> Result<Vec<Node>, EmbedError> {
        splice(&lvl.view, segments).map_err(|e| self.contradiction(format!("splice: {e}")))
    }

    /// [`select_cross_edge`] that records its choice and fails loudly.
    fn cross_edge(
        &mut self,
        lvl: &Level,
        path: &[Node],
        exclude: &[Node],
        degree_floor: Option<&SurvivingView>,
    ) -> Result<usize, EmbedError> {
        let i = select_cross_edge(path, &lvl.view, |v| lvl.decomposition.partner(v), exclude, degree_floor)
            .ok_or_else(|| self.contradiction("no usable cross edge pair on the path".into()))?;
        self.note_cross(lvl, path[i]);
        self.note_cross(lvl, path[i + 1]);
        Ok(i)
    }

    fn neighbor_other_than(&self, view: &SurvivingView, a: Node, b: Node) -> Result<Node, EmbedError> {
        other_neighbor(view, a, b).ok_or_else(|| self.contradiction(format!("{a} has no neighbor besides {b}")))
    }

    fn require_live(&self, lvl: &Level, nodes: &[Node]) -> Result<(), EmbedError> {
        match nodes.iter().find(|&&v| !lvl.live(v)) {
            Some(v) => Err(self.contradiction(format!("cross edge of {v} is dead"))),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests;
