//! Independent classification of paths and cycles.
//!
//! Nothing here trusts the producer of a sequence: the classification is a
//! function of the sequence, the surviving graph and the requested endpoints.

use std::fmt;

use serde::Serialize;

use crate::faults::{FaultSet, SurvivingView};
use crate::topology::{Graph, Node};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum PathClass {
    Hamiltonian,
    NearHamiltonian { missed: Node },
    Invalid { position: Option<usize>, reason: String },
}

impl PathClass {
    fn invalid(position: Option<usize>, reason: impl Into<String>) -> Self {
        PathClass::Invalid { position, reason: reason.into() }
    }

    pub fn is_valid(&self) -> bool {
        !matches!(self, PathClass::Invalid { .. })
    }
}

impl fmt::Display for PathClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathClass::Hamiltonian => write!(f, "hamiltonian"),
            PathClass::NearHamiltonian { missed } => write!(f, "near-hamiltonian (missed {missed})"),
            PathClass::Invalid { position: Some(i), reason } => write!(f, "invalid at {i}: {reason}"),
            PathClass::Invalid { position: None, reason } => write!(f, "invalid: {reason}"),
        }
    }
}

/// Checks `seq` as an `s`-`t` path of `g - f`.
pub fn validate_path(g: &Graph, f: &FaultSet, s: Node, t: Node, seq: &[Node]) -> PathClass {
    match SurvivingView::new(g, f) {
        Ok(view) => classify_path(&view, s, t, seq),
        Err(e) => PathClass::invalid(None, e.to_string()),
    }
}

/// Checks `seq` as a closed cycle of `g - f`.
pub fn validate_cycle(g: &Graph, f: &FaultSet, seq: &[Node]) -> PathClass {
    match SurvivingView::new(g, f) {
        Ok(view) => classify_cycle(&view, seq),
        Err(e) => PathClass::invalid(None, e.to_string()),
    }
}

/// [`validate_path`] against an existing view.
pub fn classify_path(view: &SurvivingView, s: Node, t: Node, seq: &[Node]) -> PathClass {
    if seq.first() != Some(&s) || seq.last() != Some(&t) {
        return PathClass::invalid(None, format!("wrong endpoints: expected {s}..{t}"));
    }
    if let Some(bad) = walk_errors(view, seq) {
        return bad;
    }
    coverage(view, seq)
}

/// [`validate_cycle`] against an existing view. A cycle needs at least three
/// nodes and a live closing edge.
pub fn classify_cycle(view: &SurvivingView, seq: &[Node]) -> PathClass {
    if seq.len() < 3 {
        return PathClass::invalid(None, format!("cycle of {} nodes", seq.len()));
    }
    if let Some(bad) = walk_errors(view, seq) {
        return bad;
    }
    let (first, last) = (seq[0], seq[seq.len() - 1]);
    if !view.has_edge(last, first) {
        return PathClass::invalid(Some(seq.len() - 1), "dead closing edge");
    }
    coverage(view, seq)
}

fn walk_errors(view: &SurvivingView, seq: &[Node]) -> Option<PathClass> {
    let mut seen = vec![false; view.host_len()];
    for (i, &v) in seq.iter().enumerate() {
        if !view.contains(v) {
            return Some(PathClass::invalid(Some(i), format!("faulty or unknown node {v}")));
        }
        if std::mem::replace(&mut seen[v as usize], true) {
            return Some(PathClass::invalid(Some(i), format!("repeated node {v}")));
        }
        if i > 0 && !view.has_edge(seq[i - 1], v) {
            return Some(PathClass::invalid(Some(i), format!("dead edge at position {i}")));
        }
    }
    None
}

fn coverage(view: &SurvivingView, seq: &[Node]) -> PathClass {
    let total = view.len();
    if seq.len() == total {
        PathClass::Hamiltonian
    } else if seq.len() + 1 == total {
        let mut on = vec![false; view.host_len()];
        for &v in seq {
            on[v as usize] = true;
        }
        let missed = *view.nodes().iter().find(|&&v| !on[v as usize]).expect("one node is off the walk");
        PathClass::NearHamiltonian { missed }
    } else {
        PathClass::invalid(None, format!("covers |V|-{}", total - seq.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::Graph;

    fn cycle_graph(n: u32) -> Graph {
        Graph::from_edges(n as usize, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn hamiltonian_path_on_cycle() {
        let g = cycle_graph(6);
        let f = FaultSet::new();
        assert_eq!(validate_path(&g, &f, 0, 5, &[0, 1, 2, 3, 4, 5]), PathClass::Hamiltonian);
        assert_eq!(validate_path(&g, &f, 5, 0, &[5, 4, 3, 2, 1, 0]), PathClass::Hamiltonian);
    }

    #[test]
    fn two_short_is_invalid() {
        let g = cycle_graph(6);
        let r = validate_path(&g, &FaultSet::new(), 0, 3, &[0, 1, 2, 3]);
        assert_eq!(r, PathClass::Invalid { position: None, reason: "covers |V|-2".into() });
    }

    #[test]
    fn near_hamiltonian_reports_missed() {
        let g = cycle_graph(6);
        let r = validate_path(&g, &FaultSet::new(), 0, 4, &[0, 1, 2, 3, 4]);
        assert_eq!(r, PathClass::NearHamiltonian { missed: 5 });
    }

    #[test]
    fn faulty_edge_is_dead() {
        let g = cycle_graph(6);
        let f = FaultSet::from_parts([], [(2, 3)]);
        let r = validate_path(&g, &f, 0, 5, &[0, 1, 2, 3, 4, 5]);
        assert_eq!(r, PathClass::Invalid { position: Some(3), reason: "dead edge at position 3".into() });
    }

    #[test]
    fn repeated_and_faulty_nodes() {
        let g = cycle_graph(6);
        let r = validate_path(&g, &FaultSet::new(), 0, 0, &[0, 1, 0]);
        assert!(matches!(r, PathClass::Invalid { position: Some(2), .. }));
        let r = validate_path(&g, &FaultSet::from_parts([1], []), 0, 2, &[0, 1, 2]);
        assert!(matches!(r, PathClass::Invalid { position: Some(1), .. }));
        let r = validate_path(&g, &FaultSet::new(), 1, 2, &[0, 1, 2]);
        assert!(matches!(r, PathClass::Invalid { position: None, .. }));
    }

    #[test]
    fn cycles() {
        let tri = cycle_graph(3);
        assert_eq!(validate_cycle(&tri, &FaultSet::new(), &[0, 1, 2]), PathClass::Hamiltonian);
        let c4 = cycle_graph(4);
        assert!(!validate_cycle(&c4, &FaultSet::new(), &[0, 1, 2]).is_valid());
        // 4-cycle 0-1-2-3 plus node 4 hanging off 0 and 2
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 2)]).unwrap();
        assert_eq!(validate_cycle(&g, &FaultSet::new(), &[0, 1, 2, 3]), PathClass::NearHamiltonian { missed: 4 });
        assert!(!validate_cycle(&g, &FaultSet::new(), &[0, 1]).is_valid());
    }
}
