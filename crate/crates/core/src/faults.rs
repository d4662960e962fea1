//! Fault sets, the surviving graph `G - F`, and fault partitions across a
//! decomposition level.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{Block, Graph, Node, ThlnGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FaultError {
    #[error("fault names a nonexistent element: {0}")]
    ForeignFault(String),
    #[error("endpoint {0} is faulty or absent")]
    FaultyEndpoint(Node),
    #[error("endpoints must be distinct")]
    SameEndpoints,
    #[error("graph has no decomposition")]
    NoDecomposition,
    #[error("every node of the half is faulty")]
    EmptyHalf,
    #[error("invalid fault document: {0}")]
    InvalidDocument(String),
}

/// A single faulty element. The derived order (nodes before edges, each
/// ascending) is the canonical order used whenever a fault must be picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaultElement {
    Node(Node),
    Edge(Node, Node),
}

impl FaultElement {
    /// An edge fault with its endpoints ordered.
    pub fn edge(u: Node, v: Node) -> Self {
        FaultElement::Edge(u.min(v), u.max(v))
    }

    /// Whether the element lies inside `block` (node in it, or both ends in it).
    pub fn within(&self, block: Block) -> bool {
        match *self {
            FaultElement::Node(v) => block.contains(v),
            FaultElement::Edge(u, v) => block.contains(u) && block.contains(v),
        }
    }
}

/// Faulty nodes and faulty edges. `|F|` counts both, including redundant
/// edge faults whose endpoints are already faulty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FaultSet {
    nodes: BTreeSet<Node>,
    edges: BTreeSet<(Node, Node)>,
}

impl FaultSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts(nodes: impl IntoIterator<Item = Node>, edges: impl IntoIterator<Item = (Node, Node)>) -> Self {
        let mut f = FaultSet::new();
        for v in nodes {
            f.add_node(v);
        }
        for (u, v) in edges {
            f.add_edge(u, v);
        }
        f
    }

    pub fn add_node(&mut self, v: Node) -> bool {
        self.nodes.insert(v)
    }

    pub fn add_edge(&mut self, u: Node, v: Node) -> bool {
        self.edges.insert((u.min(v), u.max(v)))
    }

    pub fn insert(&mut self, e: FaultElement) -> bool {
        match e {
            FaultElement::Node(v) => self.add_node(v),
            FaultElement::Edge(u, v) => self.add_edge(u, v),
        }
    }

    pub fn remove(&mut self, e: FaultElement) -> bool {
        match e {
            FaultElement::Node(v) => self.nodes.remove(&v),
            FaultElement::Edge(u, v) => self.edges.remove(&(u.min(v), u.max(v))),
        }
    }

    /// A copy with `e` imagined fault-free.
    pub fn without(&self, e: FaultElement) -> FaultSet {
        let mut f = self.clone();
        f.remove(e);
        f
    }

    pub fn len(&self) -> usize {
        self.nodes.len() + self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn nodes(&self) -> &BTreeSet<Node> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(Node, Node)> {
        &self.edges
    }

    pub fn is_node_faulty(&self, v: Node) -> bool {
        self.nodes.contains(&v)
    }

    pub fn is_edge_faulty(&self, u: Node, v: Node) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FaultElement> + '_ {
        self.nodes
            .iter()
            .map(|&v| FaultElement::Node(v))
            .chain(self.edges.iter().map(|&(u, v)| FaultElement::Edge(u, v)))
    }

    /// Elements lying inside `block`.
    pub fn restricted(&self, block: Block) -> FaultSet {
        let mut f = FaultSet::new();
        for e in self.elements().filter(|e| e.within(block)) {
            f.insert(e);
        }
        f
    }

    /// Checks that every element exists in `graph`.
    pub fn check_against(&self, graph: &Graph) -> Result<(), FaultError> {
        if let Some(v) = self.nodes.iter().find(|&&v| !graph.contains(v)) {
            return Err(FaultError::ForeignFault(format!("node {v}")));
        }
        if let Some((u, v)) = self.edges.iter().find(|&&(u, v)| !graph.has_edge(u, v)) {
            return Err(FaultError::ForeignFault(format!("edge ({u},{v})")));
        }
        Ok(())
    }

    pub fn to_document(&self) -> FaultDocument {
        FaultDocument {
            nodes: self.nodes.iter().copied().collect(),
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }

    pub fn from_document(doc: &FaultDocument) -> FaultSet {
        FaultSet::from_parts(doc.nodes.iter().copied(), doc.edges.iter().map(|e| (e[0], e[1])))
    }

    /// Canonical compact JSON, newline terminated.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(&self.to_document()).expect("fault document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<FaultSet, FaultError> {
        let doc: FaultDocument = serde_json::from_str(text).map_err(|e| FaultError::InvalidDocument(e.to_string()))?;
        Ok(FaultSet::from_document(&doc))
    }
}

/// Serialized fault set: `{"nodes": [...], "edges": [[u,v],...]}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultDocument {
    pub nodes: Vec<Node>,
    pub edges: Vec<[Node; 2]>,
}

const ABSENT: u32 = u32::MAX;

/// The surviving graph `G - F`, materialized.
///
/// A node is present iff it is not faulty; an edge is present iff both ends
/// are present and the edge itself is not faulty. Views can be narrowed
/// further with [`SurvivingView::induced`] and [`SurvivingView::without`].
#[derive(Debug, Clone)]
pub struct SurvivingView {
    faults: FaultSet,
    nodes: Vec<Node>,
    slot: Vec<u32>,
    adj: Vec<Vec<Node>>,
}

impl SurvivingView {
    pub fn new(graph: &Graph, faults: &FaultSet) -> Result<Self, FaultError> {
        faults.check_against(graph)?;
        let alive = |v: Node| !faults.is_node_faulty(v);
        let nodes: Vec<Node> = (0..graph.node_count() as Node).filter(|&v| alive(v)).collect();
        let mut slot = vec![ABSENT; graph.node_count()];
        for (i, &v) in nodes.iter().enumerate() {
            slot[v as usize] = i as u32;
        }
        let adj = nodes
            .iter()
            .map(|&v| {
                graph.neighbors(v).iter().copied().filter(|&w| alive(w) && !faults.is_edge_faulty(v, w)).collect()
            })
            .collect();
        Ok(SurvivingView { faults: faults.clone(), nodes, slot, adj })
    }

    /// View of a fault-free graph.
    pub fn full(graph: &Graph) -> Self {
        SurvivingView::new(graph, &FaultSet::new()).expect("empty fault set is always valid")
    }

    /// The subgraph induced by the present nodes satisfying `keep`.
    pub fn induced(&self, keep: impl Fn(Node) -> bool) -> SurvivingView {
        let nodes: Vec<Node> = self.nodes.iter().copied().filter(|&v| keep(v)).collect();
        let mut slot = vec![ABSENT; self.slot.len()];
        for (i, &v) in nodes.iter().enumerate() {
            slot[v as usize] = i as u32;
        }
        let adj = nodes
            .iter()
            .map(|&v| self.neighbors(v).iter().copied().filter(|&w| slot[w as usize] != ABSENT).collect())
            .collect();
        SurvivingView { faults: self.faults.clone(), nodes, slot, adj }
    }

    /// The subgraph induced by the present nodes of `block`.
    pub fn restrict(&self, block: Block) -> SurvivingView {
        self.induced(|v| block.contains(v))
    }

    /// This view with `removed` deleted as well.
    pub fn without(&self, removed: &[Node]) -> SurvivingView {
        self.induced(|v| !removed.contains(&v))
    }

    pub fn faults(&self) -> &FaultSet {
        &self.faults
    }

    pub fn host_len(&self) -> usize {
        self.slot.len()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Present nodes in ascending order.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn contains(&self, v: Node) -> bool {
        (v as usize) < self.slot.len() && self.slot[v as usize] != ABSENT
    }

    /// Index of `v` among [`SurvivingView::nodes`].
    pub fn index_of(&self, v: Node) -> Option<usize> {
        match self.slot.get(v as usize) {
            Some(&i) if i != ABSENT => Some(i as usize),
            _ => None,
        }
    }

    /// Surviving neighbors (empty for absent nodes).
    pub fn neighbors(&self, v: Node) -> &[Node] {
        match self.index_of(v) {
            Some(i) => &self.adj[i],
            None => &[],
        }
    }

    pub fn degree(&self, v: Node) -> usize {
        self.neighbors(v).len()
    }

    pub fn has_edge(&self, u: Node, v: Node) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// `(δ, witness)`: the minimum degree and the lowest-indexed node attaining it.
    pub fn min_degree(&self) -> Option<(usize, Node)> {
        self.nodes.iter().map(|&v| (self.degree(v), v)).min()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Builds the view `G - F`.
pub fn surviving_view(g: &Graph, f: &FaultSet) -> Result<SurvivingView, FaultError> {
    SurvivingView::new(g, f)
}

/// Faults of one decomposition level split by where they live.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultPartition {
    pub f1: FaultSet,
    pub f2: FaultSet,
    /// Faulty cross edges.
    pub fc_direct: Vec<(Node, Node)>,
    /// Dead cross edges, `E_c - E(G - F)`; contains `fc_direct`.
    pub fc_effective: Vec<(Node, Node)>,
}

/// Splits `f` across the top-level decomposition of `g`.
pub fn partition(g: &ThlnGraph, f: &FaultSet) -> Result<FaultPartition, FaultError> {
    partition_block(g, f, g.block())
}

/// Splits the faults lying inside `block` across that block's halves.
pub fn partition_block(g: &ThlnGraph, f: &FaultSet, block: Block) -> Result<FaultPartition, FaultError> {
    let d = g.decomposition_at(block).ok_or(FaultError::NoDecomposition)?;
    let (h1, h2) = block.halves();
    let f1 = f.restricted(h1);
    let f2 = f.restricted(h2);
    let cross = d.matching();
    let fc_direct = cross.iter().copied().filter(|&(u, v)| f.is_edge_faulty(u, v)).collect();
    let fc_effective = cross
        .iter()
        .copied()
        .filter(|&(u, v)| f.is_node_faulty(u) || f.is_node_faulty(v) || f.is_edge_faulty(u, v))
        .collect();
    Ok(FaultPartition { f1, f2, fc_direct, fc_effective })
}

/// Fault count and minimum degree of one half.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfAnalysis {
    pub fault_count: usize,
    pub min_degree: usize,
    pub min_degree_witness: Node,
}

/// Analyzes the half `half` of `view`, counting only intra-half surviving
/// edges. Fails with [`FaultError::EmptyHalf`] when no node survives.
pub fn analyze_half(view: &SurvivingView, half: Block) -> Result<HalfAnalysis, FaultError> {
    let fault_count = view.faults().restricted(half).len();
    let sub = view.restrict(half);
    let (min_degree, min_degree_witness) = sub.min_degree().ok_or(FaultError::EmptyHalf)?;
    Ok(HalfAnalysis { fault_count, min_degree, min_degree_witness })
}

/// True iff `s` and `t` each have a surviving neighbor other than the other.
/// Without it no `s`-`t` path of length two or more can exist.
pub fn neighbor_condition(view: &SurvivingView, s: Node, t: Node) -> Result<bool, FaultError> {
    for v in [s, t] {
        if !view.contains(v) {
            return Err(FaultError::FaultyEndpoint(v));
        }
    }
    if s == t {
        return Err(FaultError::SameEndpoints);
    }
    let other = |a: Node, b: Node| view.neighbors(a).iter().any(|&w| w != b);
    Ok(other(s, t) && other(t, s))
}
