//! Twisted hypercube-like networks.
//!
//! An `n`-dimensional THLN is either a fixed 3-regular graph on eight nodes
//! (`n = 3`) or two `(n-1)`-dimensional THLNs joined by an arbitrary perfect
//! matching. Node identifiers are plain indices `0..2^n` and every level of the
//! recursion splits a block of indices at its top bit: inside a block
//! `[offset, offset + 2^d)` the first `2^(d-1)` indices form half 1 and the
//! rest form half 2. The cross-edge matching of every level is recorded in a
//! [`Decomposition`] tree, so cross partners are a table lookup.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Node identifier.
pub type Node = u32;

/// Largest dimension the builders accept.
pub const MAX_DIMENSION: u32 = 24;

/// Edge list of the built-in 3-dimensional base graph.
///
/// This is the 3-dimensional locally twisted cube: bits 0 and 1 flip
/// directly, bit 2 flips together with bit 1 whenever bit 0 is set. It is
/// 3-regular, connected and contains the 5-cycle `0-1-7-6-2`, so it is not
/// bipartite.
pub const DEFAULT_BASE_EDGES: [(Node, Node); 12] =
    [(0, 1), (0, 2), (0, 4), (1, 3), (1, 7), (2, 3), (2, 6), (3, 5), (4, 5), (4, 6), (5, 7), (6, 7)];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("malformed base graph: {0}")]
    MalformedBase(String),
    #[error("dimension mismatch: halves have dimensions {0} and {1}")]
    DimensionMismatch(u32, u32),
    #[error("matching is not a bijection: {0}")]
    NotABijection(String),
    #[error("variant not defined at dimension {0}")]
    UnsupportedDimension(u32),
    #[error("graph has no decomposition (dimension 3 base)")]
    NoDecomposition,
    #[error("node {0} is not in the graph")]
    UnknownNode(Node),
    #[error("invalid edge list: {0}")]
    InvalidEdges(String),
    #[error("graph document fails shape checks: {0}")]
    InvalidShape(String),
}

/// A simple undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Node>>,
}

impl Graph {
    /// Builds a simple graph, rejecting loops, duplicates and out-of-range ends.
    pub fn from_edges(node_count: usize, edges: impl IntoIterator<Item = (Node, Node)>) -> Result<Self, TopologyError> {
        let mut adj = vec![Vec::new(); node_count];
        for (u, v) in edges {
            if u as usize >= node_count || v as usize >= node_count {
                return Err(TopologyError::InvalidEdges(format!("edge ({u},{v}) out of range for {node_count} nodes")));
            }
            if u == v {
                return Err(TopologyError::InvalidEdges(format!("self-loop at {u}")));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(TopologyError::InvalidEdges(format!("duplicate edge ({u},{})", w[0])));
            }
        }
        Ok(Graph { adj })
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn contains(&self, v: Node) -> bool {
        (v as usize) < self.adj.len()
    }

    pub fn neighbors(&self, v: Node) -> &[Node] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: Node) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, u: Node, v: Node) -> bool {
        self.contains(u) && self.contains(v) && self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            let u = u as Node;
            list.iter().copied().filter(move |&v| u < v).map(move |v| (u, v))
        })
    }

    pub fn is_connected(&self) -> bool {
        if self.adj.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![0 as Node];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u as usize] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.adj.len()
    }
}

/// A contiguous range of node identifiers at one level of the recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub offset: Node,
    pub dimension: u32,
}

impl Block {
    pub fn new(offset: Node, dimension: u32) -> Self {
        Block { offset, dimension }
    }

    pub fn len(&self) -> usize {
        1usize << self.dimension
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: Node) -> bool {
        v >= self.offset && ((v - self.offset) as usize) < self.len()
    }

    pub fn nodes(&self) -> std::ops::Range<Node> {
        self.offset..self.offset + self.len() as Node
    }

    /// The two halves `(lower, upper)`; panics at dimension 0.
    pub fn halves(&self) -> (Block, Block) {
        let d = self.dimension - 1;
        (Block::new(self.offset, d), Block::new(self.offset + (1 << d), d))
    }
}

/// One level of the recursive construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    block: Block,
    /// `partner[i]` is the cross partner of `block.offset + i`.
    partner: Vec<Node>,
    children: Option<Box<[Decomposition; 2]>>,
}

impl Decomposition {
    pub fn block(&self) -> Block {
        self.block
    }

    pub fn half1(&self) -> Block {
        self.block.halves().0
    }

    pub fn half2(&self) -> Block {
        self.block.halves().1
    }

    /// Cross partner of `v` at this level, if `v` lies in the block.
    pub fn partner(&self, v: Node) -> Option<Node> {
        if self.block.contains(v) {
            self.partner.get((v - self.block.offset) as usize).copied()
        } else {
            None
        }
    }

    /// Cross pairs `(u1, u2)` with `u1` in half 1, sorted by `u1`.
    pub fn matching(&self) -> Vec<(Node, Node)> {
        self.half1().nodes().map(|u| (u, self.partner[(u - self.block.offset) as usize])).collect()
    }

    pub fn children(&self) -> Option<&[Decomposition; 2]> {
        self.children.as_deref()
    }

    fn shifted(&self, by: Node) -> Decomposition {
        Decomposition {
            block: Block::new(self.block.offset + by, self.block.dimension),
            partner: self.partner.iter().map(|&p| p + by).collect(),
            children: self.children.as_ref().map(|c| Box::new([c[0].shifted(by), c[1].shifted(by)])),
        }
    }

    /// Reads the cross matching of every level straight off the edge set.
    ///
    /// Each node of a block must have exactly one neighbor in the opposite
    /// half; otherwise the block is not a join and `None` is returned.
    fn from_graph(graph: &Graph, block: Block) -> Option<Decomposition> {
        if block.dimension <= 3 {
            return None;
        }
        let (h1, h2) = block.halves();
        let mut partner = Vec::with_capacity(block.len());
        for v in block.nodes() {
            let other = if h1.contains(v) { h2 } else { h1 };
            let mut cross = graph.neighbors(v).iter().filter(|&&w| other.contains(w));
            let p = *cross.next()?;
            if cross.next().is_some() {
                return None;
            }
            partner.push(p);
        }
        let c1 = Decomposition::from_graph(graph, h1);
        let c2 = Decomposition::from_graph(graph, h2);
        let children = match (c1, c2) {
            (Some(a), Some(b)) => Some(Box::new([a, b])),
            _ if block.dimension == 4 => None,
            _ => return None,
        };
        Some(Decomposition { block, partner, children })
    }
}

/// Base graph choice for [`make_base`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseSpec {
    Default,
    Custom(Vec<(Node, Node)>),
}

/// The graph families [`make_preset`] can build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VariantSpec {
    /// Default base joined with identity matchings at every level.
    Base3Default,
    /// Custom base joined with identity matchings at every level.
    Base3Custom(Vec<(Node, Node)>),
    Crossed,
    Mobius0,
    Mobius1,
    LocallyTwisted,
    /// Default base, every level's matching drawn from a seeded generator.
    Random(u64),
}

impl VariantSpec {
    /// Parses the CLI names `base3`, `crossed`, `mobius0`, `mobius1`,
    /// `locally-twisted` and `random` (the latter takes `seed`).
    pub fn from_name(name: &str, seed: u64) -> Option<VariantSpec> {
        Some(match name {
            "base3" | "base3-default" => VariantSpec::Base3Default,
            "crossed" => VariantSpec::Crossed,
            "mobius0" => VariantSpec::Mobius0,
            "mobius1" => VariantSpec::Mobius1,
            "locally-twisted" => VariantSpec::LocallyTwisted,
            "random" => VariantSpec::Random(seed),
            _ => return None,
        })
    }
}

/// An immutable THLN together with its recursive decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThlnGraph {
    dimension: u32,
    graph: Graph,
    decomposition: Option<Decomposition>,
}

impl std::ops::Deref for ThlnGraph {
    type Target = Graph;
    fn deref(&self) -> &Graph {
        &self.graph
    }
}

/// Builds a dimension-3 graph from the default or a custom edge list.
pub fn make_base(spec: &BaseSpec) -> Result<ThlnGraph, TopologyError> {
    let edges: Vec<(Node, Node)> = match spec {
        BaseSpec::Default => DEFAULT_BASE_EDGES.to_vec(),
        BaseSpec::Custom(e) => e.clone(),
    };
    let graph = Graph::from_edges(8, edges).map_err(|e| TopologyError::MalformedBase(e.to_string()))?;
    if let Some(v) = (0..8).find(|&v| graph.degree(v) != 3) {
        return Err(TopologyError::MalformedBase(format!("node {v} has degree {}, expected 3", graph.degree(v))));
    }
    if !graph.is_connected() {
        return Err(TopologyError::MalformedBase("base graph is disconnected".into()));
    }
    Ok(ThlnGraph { dimension: 3, graph, decomposition: None })
}

/// Joins two graphs of equal dimension along `matching`, a list of pairs
/// `(u, v)` with `u` a node of `g1` and `v` a node of `g2` (both in their own
/// local numbering). Nodes of `g2` are shifted by `2^(n-1)`.
pub fn join(g1: &ThlnGraph, g2: &ThlnGraph, matching: &[(Node, Node)]) -> Result<ThlnGraph, TopologyError> {
    if g1.dimension != g2.dimension {
        return Err(TopologyError::DimensionMismatch(g1.dimension, g2.dimension));
    }
    let half = g1.node_count();
    if matching.len() != half {
        return Err(TopologyError::NotABijection(format!("{} pairs for halves of {half} nodes", matching.len())));
    }
    let mut left = vec![false; half];
    let mut right = vec![false; half];
    for &(u, v) in matching {
        if u as usize >= half || v as usize >= half {
            return Err(TopologyError::NotABijection(format!("pair ({u},{v}) out of range")));
        }
        if std::mem::replace(&mut left[u as usize], true) {
            return Err(TopologyError::NotABijection(format!("source {u} mapped twice")));
        }
        if std::mem::replace(&mut right[v as usize], true) {
            return Err(TopologyError::NotABijection(format!("target {v} hit twice")));
        }
    }
    let shift = half as Node;
    let edges = g1
        .edges()
        .chain(g2.edges().map(|(u, v)| (u + shift, v + shift)))
        .chain(matching.iter().map(|&(u, v)| (u, v + shift)));
    let dimension = g1.dimension + 1;
    let graph = Graph::from_edges(2 * half, edges)?;
    let mut partner = vec![0; 2 * half];
    for &(u, v) in matching {
        partner[u as usize] = v + shift;
        partner[(v + shift) as usize] = u;
    }
    let children = match (&g1.decomposition, &g2.decomposition) {
        (Some(a), Some(b)) => Some(Box::new([a.clone(), b.shifted(shift)])),
        _ => None,
    };
    Ok(ThlnGraph {
        dimension,
        graph,
        decomposition: Some(Decomposition { block: Block::new(0, dimension), partner, children }),
    })
}

/// Builds an `n`-dimensional member of the requested family.
///
/// Crossed, Möbius and locally twisted cubes follow their usual bitwise
/// adjacency rules with the most significant bit as the top-level split; the
/// decomposition is read back from the edge set.
pub fn make_preset(spec: &VariantSpec, n: u32) -> Result<ThlnGraph, TopologyError> {
    if !(3..=MAX_DIMENSION).contains(&n) {
        return Err(TopologyError::UnsupportedDimension(n));
    }
    match spec {
        VariantSpec::Base3Default => identity_tower(make_base(&BaseSpec::Default)?, n),
        VariantSpec::Base3Custom(edges) => identity_tower(make_base(&BaseSpec::Custom(edges.clone()))?, n),
        VariantSpec::Random(seed) => {
            let base = make_base(&BaseSpec::Default)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            random_tower(&base, n, &mut rng)
        }
        VariantSpec::Crossed => from_rule(n, crossed_neighbor),
        VariantSpec::LocallyTwisted => from_rule(n, locally_twisted_neighbor),
        VariantSpec::Mobius0 => from_rule(n, |x, bit, n| mobius_neighbor(x, bit, n, false)),
        VariantSpec::Mobius1 => from_rule(n, |x, bit, n| mobius_neighbor(x, bit, n, true)),
    }
}

fn identity_tower(base: ThlnGraph, n: u32) -> Result<ThlnGraph, TopologyError> {
    let mut g = base;
    while g.dimension < n {
        let m: Vec<(Node, Node)> = (0..g.node_count() as Node).map(|v| (v, v)).collect();
        g = join(&g, &g, &m)?;
    }
    Ok(g)
}

fn random_tower(base: &ThlnGraph, n: u32, rng: &mut ChaCha8Rng) -> Result<ThlnGraph, TopologyError> {
    if n == 3 {
        return Ok(base.clone());
    }
    let g1 = random_tower(base, n - 1, rng)?;
    let g2 = random_tower(base, n - 1, rng)?;
    let mut targets: Vec<Node> = (0..g1.node_count() as Node).collect();
    targets.shuffle(rng);
    let m: Vec<(Node, Node)> = targets.into_iter().enumerate().map(|(u, v)| (u as Node, v)).collect();
    join(&g1, &g2, &m)
}

fn from_rule(n: u32, rule: impl Fn(Node, u32, u32) -> Node) -> Result<ThlnGraph, TopologyError> {
    let size = 1usize << n;
    let mut edges = Vec::with_capacity(size * n as usize / 2);
    for x in 0..size as Node {
        for bit in 0..n {
            let y = rule(x, bit, n);
            if x < y {
                edges.push((x, y));
            }
        }
    }
    let graph = Graph::from_edges(size, edges)?;
    let decomposition = Decomposition::from_graph(&graph, Block::new(0, n));
    if n > 3 && decomposition.is_none() {
        return Err(TopologyError::UnsupportedDimension(n));
    }
    Ok(ThlnGraph { dimension: n, graph, decomposition })
}

fn locally_twisted_neighbor(x: Node, bit: u32, _n: u32) -> Node {
    if bit >= 2 && x & 1 == 1 {
        x ^ (1 << bit) ^ (1 << (bit - 1))
    } else {
        x ^ (1 << bit)
    }
}

fn crossed_neighbor(x: Node, bit: u32, _n: u32) -> Node {
    let mut y = x ^ (1 << bit);
    // Below the flipped bit (and its odd-position companion) every pair of
    // bits maps 01 <-> 11 and fixes 00, 10.
    for i in 0..bit / 2 {
        if x & (1 << (2 * i)) != 0 {
            y ^= 1 << (2 * i + 1);
        }
    }
    y
}

fn mobius_neighbor(x: Node, bit: u32, n: u32, one: bool) -> Node {
    let governing = if bit + 1 == n { one } else { x & (1 << (bit + 1)) != 0 };
    if governing {
        x ^ ((1 << (bit + 1)) - 1)
    } else {
        x ^ (1 << bit)
    }
}

impl ThlnGraph {
    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn block(&self) -> Block {
        Block::new(0, self.dimension)
    }

    pub fn decomposition(&self) -> Option<&Decomposition> {
        self.decomposition.as_ref()
    }

    /// The decomposition node whose block is exactly `block`.
    pub fn decomposition_at(&self, block: Block) -> Option<&Decomposition> {
        let mut cur = self.decomposition.as_ref()?;
        loop {
            if cur.block == block {
                return Some(cur);
            }
            if !cur.block.contains(block.offset) || cur.block.dimension <= block.dimension {
                return None;
            }
            let children = cur.children()?;
            cur = if children[0].block.contains(block.offset) { &children[0] } else { &children[1] };
        }
    }

    /// Top-level cross partner of `v`.
    pub fn cross_partner(&self, v: Node) -> Result<Node, TopologyError> {
        let d = self.decomposition.as_ref().ok_or(TopologyError::NoDecomposition)?;
        d.partner(v).ok_or(TopologyError::UnknownNode(v))
    }

    /// Top-level cross edges `(u1, u2)`, sorted by `u1`.
    pub fn cross_edges(&self) -> Result<Vec<(Node, Node)>, TopologyError> {
        Ok(self.decomposition.as_ref().ok_or(TopologyError::NoDecomposition)?.matching())
    }

    /// Assembles a graph from raw parts without checking any invariant.
    ///
    /// Intended for loading damaged documents and building mutants; run
    /// [`check_shape`] on the result before trusting it.
    pub fn from_document_unchecked(doc: &GraphDocument) -> Result<ThlnGraph, TopologyError> {
        if !(1..=MAX_DIMENSION).contains(&doc.dimension) {
            return Err(TopologyError::UnsupportedDimension(doc.dimension));
        }
        let size = 1usize << doc.dimension;
        let graph = Graph::from_edges(size, doc.edges.iter().map(|e| (e[0], e[1])))?;
        let decomposition = match &doc.decomposition {
            Some(d) => Some(decomposition_from_doc(d, Block::new(0, doc.dimension))?),
            None => None,
        };
        Ok(ThlnGraph { dimension: doc.dimension, graph, decomposition })
    }

    /// Loads a document and rejects it unless every shape check passes.
    pub fn from_document(doc: &GraphDocument) -> Result<ThlnGraph, TopologyError> {
        let g = ThlnGraph::from_document_unchecked(doc)?;
        let report = check_shape(&g);
        if let Some(fail) = report.failures().next() {
            return Err(TopologyError::InvalidShape(format!("{}: {}", fail.name, fail.detail)));
        }
        Ok(g)
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            dimension: self.dimension,
            edges: self.graph.edges().map(|(u, v)| [u, v]).collect(),
            decomposition: self.decomposition.as_ref().map(decomposition_to_doc),
        }
    }

    /// Canonical compact JSON, newline terminated.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(&self.to_document()).expect("graph document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<ThlnGraph, TopologyError> {
        let doc: GraphDocument = serde_json::from_str(text).map_err(|e| TopologyError::InvalidEdges(e.to_string()))?;
        ThlnGraph::from_document(&doc)
    }

    /// Graphviz rendering with nodes labeled by their `n`-bit binary strings.
    /// Nodes listed in `highlight` are filled red.
    pub fn to_dot(&self, highlight: &BTreeSet<Node>) -> String {
        let width = self.dimension as usize;
        let mut out = String::from("graph thln {\n");
        for v in 0..self.node_count() as Node {
            let _ = write!(out, "  {v} [label=\"{v:0width$b}\"");
            if highlight.contains(&v) {
                out.push_str(", style=filled, fillcolor=red");
            }
            out.push_str("];\n");
        }
        for (u, v) in self.graph.edges() {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }
}

fn decomposition_to_doc(d: &Decomposition) -> DecompositionDocument {
    DecompositionDocument {
        half1: d.half1().nodes().collect(),
        matching: d.matching().into_iter().map(|(u, v)| [u, v]).collect(),
        children: d.children().map(|c| c.iter().map(decomposition_to_doc).collect()).unwrap_or_default(),
    }
}

fn decomposition_from_doc(doc: &DecompositionDocument, block: Block) -> Result<Decomposition, TopologyError> {
    if block.dimension < 2 {
        return Err(TopologyError::InvalidShape("decomposition below dimension 2".into()));
    }
    let (h1, h2) = block.halves();
    if doc.half1.len() != h1.len() || !doc.half1.iter().copied().eq(h1.nodes()) {
        return Err(TopologyError::InvalidShape(format!(
            "half1 of block at {} is not the lower index half",
            block.offset
        )));
    }
    // Missing or duplicated pairs are left for check_shape to report; the
    // table marks unmatched nodes with an out-of-block sentinel.
    let sentinel = Node::MAX;
    let mut partner = vec![sentinel; block.len()];
    for &[u, v] in &doc.matching {
        if !h1.contains(u) || !h2.contains(v) {
            return Err(TopologyError::InvalidShape(format!("cross pair ({u},{v}) outside the halves")));
        }
        partner[(u - block.offset) as usize] = v;
        partner[(v - block.offset) as usize] = u;
    }
    let children = match doc.children.as_slice() {
        [] => None,
        [a, b] => Some(Box::new([decomposition_from_doc(a, h1)?, decomposition_from_doc(b, h2)?])),
        _ => return Err(TopologyError::InvalidShape("decomposition must have 0 or 2 children".into())),
    };
    Ok(Decomposition { block, partner, children })
}

/// Serialized graph: `{"dimension", "edges", "decomposition"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub dimension: u32,
    pub edges: Vec<[Node; 2]>,
    pub decomposition: Option<DecompositionDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionDocument {
    pub half1: Vec<Node>,
    pub matching: Vec<[Node; 2]>,
    pub children: Vec<DecompositionDocument>,
}

/// One named check in a [`ShapeReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShapeCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ShapeReport {
    pub checks: Vec<ShapeCheck>,
}

impl ShapeReport {
    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(ShapeCheck { name: name.into(), passed, detail: detail.into() });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ShapeCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Whether some failed check has a name starting with `prefix`.
    pub fn failed(&self, prefix: &str) -> bool {
        self.failures().any(|c| c.name.starts_with(prefix))
    }
}

/// Verifies node, edge and matching counts plus regularity at every level.
pub fn check_shape(g: &ThlnGraph) -> ShapeReport {
    let mut report = ShapeReport::default();
    let n = g.dimension;
    let expected_nodes = 1usize << n;
    report.push(
        "node-count",
        g.node_count() == expected_nodes,
        format!("{} nodes, expected {expected_nodes}", g.node_count()),
    );
    check_block(g, g.block(), &mut report);
    if n > 3 {
        match g.decomposition() {
            Some(d) => check_decomposition(g, d, &mut report),
            None => report.push("decomposition", false, "missing above dimension 3"),
        }
    }
    report
}

fn check_block(g: &ThlnGraph, block: Block, report: &mut ShapeReport) {
    let d = block.dimension as usize;
    let at = format!("block {}/{}", block.offset, block.dimension);
    let bad = block.nodes().find(|&v| g.neighbors(v).iter().filter(|&&w| block.contains(w)).count() != d);
    report.push(
        format!("regularity[{at}]"),
        bad.is_none(),
        match bad {
            Some(v) => format!("node {v} does not have degree {d} inside the block"),
            None => format!("all nodes have degree {d}"),
        },
    );
    let edges: usize =
        block.nodes().map(|v| g.neighbors(v).iter().filter(|&&w| w > v && block.contains(w)).count()).sum();
    let expected = d << (d - 1);
    report.push(format!("edge-count[{at}]"), edges == expected, format!("{edges} edges, expected {expected}"));
    if d == 3 {
        let sub = Graph::from_edges(
            8,
            block
                .nodes()
                .flat_map(|v| {
                    g.neighbors(v)
                        .iter()
                        .filter(move |&&w| w > v && block.contains(w))
                        .map(move |&w| (v - block.offset, w - block.offset))
                })
                .collect::<Vec<_>>(),
        );
        let connected = sub.map(|s| s.is_connected()).unwrap_or(false);
        report.push(format!("base-connected[{at}]"), connected, "base graph connectivity");
    }
}

fn check_decomposition(g: &ThlnGraph, d: &Decomposition, report: &mut ShapeReport) {
    let block = d.block;
    let at = format!("block {}/{}", block.offset, block.dimension);
    let (h1, h2) = block.halves();
    let pairs: Vec<(Node, Node)> =
        h1.nodes().map(|u| (u, d.partner[(u - block.offset) as usize])).filter(|&(_, v)| h2.contains(v)).collect();
    let expected = h1.len();
    report.push(
        format!("matching-size[{at}]"),
        pairs.len() == expected,
        format!("{} cross pairs, expected {expected}", pairs.len()),
    );
    let mut hit = vec![false; h2.len()];
    let mut bijective = true;
    for &(u, v) in &pairs {
        let slot = &mut hit[(v - h2.offset) as usize];
        if *slot || d.partner[(v - block.offset) as usize] != u {
            bijective = false;
        }
        *slot = true;
    }
    report.push(format!("matching-bijective[{at}]"), bijective, "matching is a bijection half1 -> half2");
    let missing = pairs.iter().find(|&&(u, v)| !g.has_edge(u, v));
    report.push(
        format!("cross-edges-present[{at}]"),
        missing.is_none(),
        match missing {
            Some((u, v)) => format!("cross pair ({u},{v}) is not an edge"),
            None => "every cross pair is an edge".into(),
        },
    );
    let stray = h1.nodes().find(|&u| g.neighbors(u).iter().filter(|&&w| h2.contains(w)).count() != 1);
    report.push(
        format!("cross-edges-only-matching[{at}]"),
        stray.is_none(),
        match stray {
            Some(u) => format!("node {u} does not have exactly one neighbor across"),
            None => "only matching edges cross the halves".into(),
        },
    );
    for h in [h1, h2] {
        check_block(g, h, report);
    }
    match (d.children(), block.dimension) {
        (Some(children), _) => {
            for c in children {
                check_decomposition(g, c, report);
            }
        }
        (None, 4) => {}
        (None, _) => report.push(format!("decomposition[{at}]"), false, "children missing above dimension 4"),
    }
}
