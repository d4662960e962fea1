//! Path surgery shared by the case solvers.

use thiserror::Error;

use crate::faults::SurvivingView;
use crate::topology::Node;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpliceError {
    #[error("node {0} appears in two segments")]
    DisjointnessViolated(Node),
    #[error("no live edge joins {0} and {1}")]
    AdjacencyViolated(Node, Node),
}

/// Concatenates `segments`, requiring a live edge of `view` between the end
/// of each segment and the start of the next, and no node used twice.
/// Edges inside a segment are not rechecked.
pub fn splice(view: &SurvivingView, segments: &[&[Node]]) -> Result<Vec<Node>, SpliceError> {
    let mut seen = vec![false; view.host_len()];
    let mut out: Vec<Node> = Vec::with_capacity(segments.iter().map(|s| s.len()).sum());
    for seg in segments.iter().filter(|s| !s.is_empty()) {
        if let Some(&last) = out.last() {
            if !view.has_edge(last, seg[0]) {
                return Err(SpliceError::AdjacencyViolated(last, seg[0]));
            }
        }
        for &v in seg.iter() {
            match seen.get_mut(v as usize) {
                Some(flag) if !*flag => *flag = true,
                _ => return Err(SpliceError::DisjointnessViolated(v)),
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// `path` read so that it starts at `first`, which must be one of its ends.
pub fn orient(path: &[Node], first: Node) -> Option<Vec<Node>> {
    if path.first() == Some(&first) {
        Some(path.to_vec())
    } else if path.last() == Some(&first) {
        Some(path.iter().rev().copied().collect())
    } else {
        None
    }
}

pub fn reversed(mut path: Vec<Node>) -> Vec<Node> {
    path.reverse();
    path
}

/// Rotation of `cycle` starting at `start`. With `toward`, the direction is
/// chosen so that `toward` sits at index at most `len / 2`, ties keeping the
/// stored direction.
pub fn rotate(cycle: &[Node], start: Node, toward: Option<Node>) -> Option<Vec<Node>> {
    let at = cycle.iter().position(|&v| v == start)?;
    let mut c: Vec<Node> = cycle[at..].iter().chain(&cycle[..at]).copied().collect();
    if let Some(t) = toward {
        let j = c.iter().position(|&v| v == t)?;
        if j > c.len() - j {
            c[1..].reverse();
        }
    }
    Some(c)
}

/// The hamiltonian path of `cycle` from `cycle[i]` to `cycle[i + 1]`
/// (indices mod length) that avoids the edge between them.
pub fn open_cycle(cycle: &[Node], i: usize) -> Vec<Node> {
    let len = cycle.len();
    (0..len).map(|k| cycle[(i + len - k) % len]).collect()
}

/// Index `i` of the first consecutive pair `(path[i], path[i + 1])` whose
/// cross edges are both live in `view` and whose partners avoid `exclude`.
/// With `degree_floor`, both partners must also have degree at least two
/// in that view.
pub fn select_cross_edge(
    path: &[Node],
    view: &SurvivingView,
    partner: impl Fn(Node) -> Option<Node>,
    exclude: &[Node],
    degree_floor: Option<&SurvivingView>,
) -> Option<usize> {
    let ok = |v: Node| match partner(v) {
        Some(p) => view.has_edge(v, p) && !exclude.contains(&p) && degree_floor.is_none_or(|half| half.degree(p) >= 2),
        None => false,
    };
    path.windows(2).position(|w| ok(w[0]) && ok(w[1]))
}
