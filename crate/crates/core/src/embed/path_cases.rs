//! Cases 4 and 5: half 1 holds every fault. One fault is imagined repaired
//! to get a cycle of half 1, which is cut back into a path of the real half.

use super::{open_cycle, reversed, EmbedError, Embedder, Level};
use crate::faults::{FaultElement, SurvivingView};
use crate::topology::Node;

fn position(path: &[Node], v: Node) -> Option<usize> {
    path.iter().position(|&x| x == v)
}

impl Embedder<'_> {
    pub fn solve_case4(&mut self, lvl: &Level, s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        let p1 = self.cut_restored_cycle(lvl, None)?;
        match (lvl.in_half1(s), lvl.in_half1(t)) {
            (true, true) => self.path_inside(lvl, &p1, s, t),
            (false, false) => self.path_outside(lvl, &p1, s, t),
            (true, false) => self.path_split(lvl, &p1, s, t),
            (false, true) => Ok(reversed(self.path_split(lvl, &p1, t, s)?)),
        }
    }

    pub fn solve_case5(&mut self, lvl: &Level, s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        let q1 = lvl.q1;
        let p1 = self.cut_restored_cycle(lvl, Some(q1))?;
        match (lvl.in_half1(s), lvl.in_half1(t)) {
            (true, true) if s != q1 && t != q1 => {
                let p = self.path_inside(lvl, &p1, s, t)?;
                self.relabel("5.1.1");
                Ok(p)
            }
            (true, true) if t == q1 => self.case5_witness_end(lvl, &p1, s, t),
            (true, true) => Ok(reversed(self.case5_witness_end(lvl, &p1, t, s)?)),
            (false, false) => {
                let p = self.path_outside(lvl, &p1, s, t)?;
                self.relabel("5.2");
                Ok(p)
            }
            (true, false) => self.case5_split(lvl, &p1, s, t),
            (false, true) => Ok(reversed(self.case5_split(lvl, &p1, t, s)?)),
        }
    }

    /// Repairs the first fault of half 1, finds a hamiltonian cycle of the
    /// repaired half (without `skip`), and cuts it at the repaired element,
    /// or at its first edge when the element is not on it.
    pub(super) fn cut_restored_cycle(&mut self, lvl: &Level, skip: Option<Node>) -> Result<Vec<Node>, EmbedError> {
        let fe = *lvl.f1_elements.first().ok_or_else(|| self.contradiction("half 1 has no fault to repair".into()))?;
        self.note_fault(fe);
        let repaired = SurvivingView::new(self.graph, &self.faults.without(fe))
            .map_err(|e| self.contradiction(e.to_string()))?
            .restrict(lvl.half1);
        let repaired = match skip {
            Some(q) => repaired.without(&[q]),
            None => repaired,
        };
        let c = self.lemma_cycle(&repaired)?;
        let len = c.len();
        let cut = match fe {
            FaultElement::Node(x) => position(&c, x).map(|i| c[i + 1..].iter().chain(&c[..i]).copied().collect()),
            FaultElement::Edge(a, b) => (0..len)
                .find(|&i| {
                    let (x, y) = (c[i], c[(i + 1) % len]);
                    (x, y) == (a, b) || (x, y) == (b, a)
                })
                .map(|i| open_cycle(&c, i)),
        };
        Ok(match cut {
            Some(p) => p,
            None => {
                self.note("repaired element not on the cycle; cut at its first edge".into());
                c[1..].iter().chain(&c[..1]).copied().collect()
            }
        })
    }

    /// Both endpoints on the path `p1` of half 1.
    fn path_inside(&mut self, lvl: &Level, p1: &[Node], s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        let mut p = p1.to_vec();
        let (mut i, mut j) = match (position(&p, s), position(&p, t)) {
            (Some(i), Some(j)) => (i, j),
            _ => return Err(self.contradiction("endpoint off the path".into())),
        };
        if i > j {
            p.reverse();
            (i, j) = (p.len() - 1 - i, p.len() - 1 - j);
        }
        let len = p.len();
        if i > len - 1 - j {
            p.reverse();
            return Ok(reversed(self.path_inside(lvl, &p, t, s)?));
        }
        let (u1, v1) = (p[0], p[len - 1]);
        let head: Vec<Node> = p[..=i].iter().rev().copied().collect();
        let tail: Vec<Node> = p[j..].iter().rev().copied().collect();
        self.require_live(lvl, &[u1, v1])?;
        self.note_cross(lvl, u1);
        self.note_cross(lvl, v1);
        if j == i + 1 {
            self.label("4.1.1");
            let p2 = self.lemma_path(&lvl.view2, lvl.partner(u1), lvl.partner(v1))?;
            self.join(lvl, &[&head, &p2, &tail])
        } else if j == i + 2 {
            self.label("4.1.2");
            if j + 1 >= len {
                return Err(self.contradiction("4.1.2 needs a node after t".into()));
            }
            let (x1, y1) = (p[i + 1], p[j + 1]);
            self.require_live(lvl, &[x1, y1])?;
            self.note_cross(lvl, x1);
            self.note_cross(lvl, y1);
            let pair =
                self.lemma_pair(&lvl.view2, lvl.partner(u1), lvl.partner(v1), lvl.partner(y1), lvl.partner(x1))?;
            let back: Vec<Node> = p[j + 1..].iter().rev().copied().collect();
            self.join(lvl, &[&head, &pair.first, &back, &pair.second, &[x1, t]])
        } else {
            self.label("4.1.3");
            let (x1, y1) = (p[i + 1], p[j - 1]);
            self.require_live(lvl, &[x1, y1])?;
            self.note_cross(lvl, x1);
            self.note_cross(lvl, y1);
            let pair =
                self.lemma_pair(&lvl.view2, lvl.partner(u1), lvl.partner(x1), lvl.partner(y1), lvl.partner(v1))?;
            self.join(lvl, &[&head, &pair.first, &p[i + 1..j], &pair.second, &tail])
        }
    }

    /// Both endpoints in half 2; `p1` is walked end to end.
    fn path_outside(&mut self, lvl: &Level, p1: &[Node], s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        let mut p = p1.to_vec();
        self.require_live(lvl, &[p[0], p[p.len() - 1]])?;
        let ends = |p: &[Node]| (lvl.partner(p[0]), lvl.partner(p[p.len() - 1]));
        let (u2, v2) = ends(&p);
        let hits = [u2, v2].iter().filter(|&&x| x == s || x == t).count();
        self.note_cross(lvl, p[0]);
        self.note_cross(lvl, p[p.len() - 1]);
        match hits {
            0 => {
                self.label("4.2.1");
                let pair = self.lemma_pair(&lvl.view2, s, u2, v2, t)?;
                self.join(lvl, &[&pair.first, &p, &pair.second])
            }
            1 => {
                self.label("4.2.2");
                if v2 == s || v2 == t {
                    p.reverse();
                }
                let (u2, v2) = ends(&p);
                if u2 == s {
                    let p2 = self.lemma_path(&lvl.view2.without(&[s]), v2, t)?;
                    self.join(lvl, &[&[s], &p, &p2])
                } else {
                    let p2 = self.lemma_path(&lvl.view2.without(&[t]), v2, s)?;
                    Ok(reversed(self.join(lvl, &[&[t], &p, &p2])?))
                }
            }
            _ => {
                self.label("4.2.3");
                if u2 != s {
                    p.reverse();
                }
                let inner = &p[1..p.len() - 1];
                let i = 1 + self.cross_edge(lvl, inner, &[s, t], None)?;
                let p2 = self.lemma_path(&lvl.view2.without(&[s, t]), lvl.partner(p[i]), lvl.partner(p[i + 1]))?;
                self.join(lvl, &[&[s], &p[..=i], &p2, &p[i + 1..], &[t]])
            }
        }
    }

    /// `s` on the path `p1`, `t` in half 2.
    fn path_split(&mut self, lvl: &Level, p1: &[Node], s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        let mut p = p1.to_vec();
        let mut i = position(&p, s).ok_or_else(|| self.contradiction(format!("{s} is off the path")))?;
        let len = p.len();
        if i > len - 1 - i {
            p.reverse();
            i = len - 1 - i;
        }
        let (u1, w1, v1) = (p[0], p[i + 1], p[len - 1]);
        self.require_live(lvl, &[u1, w1, v1])?;
        let (u2, w2, v2) = (lvl.partner(u1), lvl.partner(w1), lvl.partner(v1));
        let head: Vec<Node> = p[..=i].iter().rev().copied().collect();
        if t != u2 && t != w2 && t != v2 {
            self.label("4.3.1");
            for v in [u1, w1, v1] {
                self.note_cross(lvl, v);
            }
            let pair = self.lemma_pair(&lvl.view2, u2, w2, v2, t)?;
            return self.join(lvl, &[&head, &pair.first, &p[i + 1..], &pair.second]);
        }
        if t == v2 {
            self.label("4.3.2");
            self.note_cross(lvl, u1);
            self.note_cross(lvl, w1);
            let p2 = self.lemma_path(&lvl.view2.without(&[t]), u2, w2)?;
            return self.join(lvl, &[&head, &p2, &p[i + 1..], &[t]]);
        }
        if t == w2 {
            self.label("4.3.2");
            self.note_cross(lvl, u1);
            self.note_cross(lvl, v1);
            let p2 = self.lemma_path(&lvl.view2.without(&[t]), u2, v2)?;
            let back: Vec<Node> = p[i + 1..].iter().rev().copied().collect();
            return self.join(lvl, &[&head, &p2, &back, &[t]]);
        }
        match i {
            0 => {
                // s is an end of the path and its partner is t
                self.label("4.3.3.0");
                self.note_cross(lvl, v1);
                let p2 = self.lemma_path(&lvl.view2, v2, t)?;
                self.join(lvl, &[&p, &p2])
            }
            1 => {
                self.label("4.3.3.1");
                let xi = (2..len)
                    .rev()
                    .find(|&k| lvl.view1.has_edge(u1, p[k]))
                    .ok_or_else(|| self.contradiction(format!("{u1} has no second neighbor on the path")))?;
                match xi {
                    2 => {
                        self.note("x1 = w1".into());
                        self.note_cross(lvl, v1);
                        let p2 = self.lemma_path(&lvl.view2, v2, t)?;
                        self.join(lvl, &[&[s, u1], &p[2..], &p2])
                    }
                    3 => {
                        self.note("x1 follows w1".into());
                        self.note_cross(lvl, w1);
                        self.note_cross(lvl, v1);
                        let p2 = self.lemma_path(&lvl.view2.without(&[t]), w2, v2)?;
                        let back: Vec<Node> = p[3..].iter().rev().copied().collect();
                        self.join(lvl, &[&[s, w1], &p2, &back, &[u1, t]])
                    }
                    _ => {
                        let y1 = p[xi - 1];
                        self.require_live(lvl, &[y1])?;
                        for v in [w1, v1, y1] {
                            self.note_cross(lvl, v);
                        }
                        let pair = self.lemma_pair(&lvl.view2, w2, t, v2, lvl.partner(y1))?;
                        let back: Vec<Node> = p[2..xi].iter().rev().copied().collect();
                        self.join(lvl, &[&[s, u1], &p[xi..], &pair.second, &back, &pair.first])
                    }
                }
            }
            _ => {
                self.label("4.3.3.2");
                let x1 = p[i - 1];
                self.require_live(lvl, &[s, x1])?;
                for v in [s, w1, v1, x1] {
                    self.note_cross(lvl, v);
                }
                let pair = self.lemma_pair(&lvl.view2.without(&[t]), lvl.partner(s), w2, v2, lvl.partner(x1))?;
                let back: Vec<Node> = p[..i].iter().rev().copied().collect();
                self.join(lvl, &[&[s], &pair.first, &p[i + 1..], &pair.second, &back, &[t]])
            }
        }
    }

    /// `t` is the low-degree witness, absent from `p1`.
    fn case5_witness_end(&mut self, lvl: &Level, p1: &[Node], s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        let p = if lvl.live(t) {
            let q2 = lvl.partner(t);
            self.note_agent(t, q2);
            self.path_split(lvl, p1, s, q2)?
        } else {
            let agent = self.neighbor_other_than(&lvl.view1, t, s)?;
            self.note_agent(t, agent);
            self.path_inside(lvl, p1, s, agent)?
        };
        self.relabel("5.1.2");
        self.join(lvl, &[&p, &[t]])
    }

    fn case5_split(&mut self, lvl: &Level, p1: &[Node], s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        if s != lvl.q1 {
            let p = self.path_split(lvl, p1, s, t)?;
            let label = match self.current_label().as_str() {
                "4.3.3.1" => "5.3.1.1",
                "4.3.3.2" => "5.3.1.2",
                _ => "5.3.1",
            };
            self.relabel(label);
            return Ok(p);
        }
        let p = if lvl.live(s) && lvl.partner(s) != t {
            let q2 = lvl.partner(s);
            self.note_agent(s, q2);
            self.path_outside(lvl, p1, q2, t)?
        } else {
            let agent = self.neighbor_other_than(&lvl.view1, s, t)?;
            self.note_agent(s, agent);
            self.path_split(lvl, p1, agent, t)?
        };
        self.relabel("5.3.2");
        self.join(lvl, &[&[s], &p])
    }
}
