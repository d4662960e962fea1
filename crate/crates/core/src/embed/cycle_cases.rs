//! Cases 2 and 3: half 1 is one fault over the recursive budget, so a
//! (near-)hamiltonian cycle of half 1 replaces the recursive call. At most
//! one fault lies outside half 1.

use super::{open_cycle, reversed, rotate, EmbedError, Embedder, Level};
use crate::topology::Node;

impl Embedder<'_> {
    pub fn solve_case2(&mut self, lvl: &Level, s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        let c1 = self.lemma_cycle(&lvl.view1)?;
        match (lvl.in_half1(s), lvl.in_half1(t)) {
            (true, true) => self.cycle_inside(lvl, &c1, s, t, false),
            (false, false) => {
                self.label("2.2");
                self.cycle_outside(lvl, &c1, s, t)
            }
            (true, false) => self.cycle_split(lvl, &c1, s, t, "2.3"),
            (false, true) => Ok(reversed(self.cycle_split(lvl, &c1, t, s, "2.3")?)),
        }
    }

    pub fn solve_case3(&mut self, lvl: &Level, s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        let q1 = lvl.q1;
        let near = self.lemma_near_cycle(&lvl.view1)?;
        if near.missed != Some(q1) {
            return Err(self.contradiction(format!("near-hamiltonian cycle of half 1 must miss {q1}")));
        }
        let c1 = near.cycle;
        match (lvl.in_half1(s), lvl.in_half1(t)) {
            (true, true) if s != q1 && t != q1 => self.cycle_inside(lvl, &c1, s, t, true),
            (true, true) if t == q1 => self.case3_witness_end(lvl, &c1, s, t),
            (true, true) => Ok(reversed(self.case3_witness_end(lvl, &c1, t, s)?)),
            (false, false) => {
                let p = self.cycle_outside(lvl, &c1, s, t)?;
                self.relabel("3.2");
                Ok(p)
            }
            (true, false) => self.case3_split(lvl, &c1, s, t),
            (false, true) => Ok(reversed(self.case3_split(lvl, &c1, t, s)?)),
        }
    }

    /// Both endpoints on the cycle `c1`. `strict` selects the case-3
    /// handling of distance two, which must stay hamiltonian on the cycle.
    fn cycle_inside(
        &mut self,
        lvl: &Level,
        c1: &[Node],
        s: Node,
        t: Node,
        strict: bool,
    ) -> Result<Vec<Node>, EmbedError> {
        let c = rotate(c1, s, Some(t)).ok_or_else(|| self.contradiction("endpoint off the cycle".into()))?;
        let len = c.len();
        let j = c.iter().position(|&v| v == t).expect("rotate found t");
        match j {
            1 => {
                self.label(if strict { "3.1.1.1" } else { "2.1.1" });
                let w: Vec<Node> = std::iter::once(s).chain(c[1..].iter().rev().copied()).collect();
                self.insert_half2(lvl, &w, &[])
            }
            2 => {
                let x1 = c[1];
                let w: Vec<Node> = std::iter::once(s).chain(c[2..].iter().rev().copied()).collect();
                let (z1, y1) = (w[1], w[w.len() - 2]);
                if lvl.live(x1) {
                    self.label(if strict { "3.1.1.2" } else { "2.1.2.1" });
                    if lvl.live(y1) {
                        self.note_cross(lvl, x1);
                        self.note_cross(lvl, y1);
                        let p2 = self.lemma_path(&lvl.view2, lvl.partner(y1), lvl.partner(x1))?;
                        self.join(lvl, &[&w[..w.len() - 1], &p2, &[x1, t]])
                    } else {
                        self.require_live(lvl, &[z1])?;
                        self.note_cross(lvl, x1);
                        self.note_cross(lvl, z1);
                        let p2 = self.lemma_path(&lvl.view2, lvl.partner(x1), lvl.partner(z1))?;
                        self.join(lvl, &[&[s, x1], &p2, &w[1..]])
                    }
                } else if !strict {
                    self.label("2.1.2.2");
                    self.insert_half2(lvl, &w, &[])
                } else {
                    self.label("3.1.1.2");
                    let yj = lvl
                        .view1
                        .neighbors(x1)
                        .iter()
                        .filter_map(|&y| c.iter().position(|&v| v == y))
                        .filter(|&p| p >= 3)
                        .min()
                        .ok_or_else(|| self.contradiction(format!("{x1} has no cycle neighbor past {t}")))?;
                    let (u1, v1) = (c[yj - 1], c[len - 1]);
                    self.require_live(lvl, &[u1, v1])?;
                    self.note_cross(lvl, v1);
                    self.note_cross(lvl, u1);
                    let p2 = self.lemma_path(&lvl.view2, lvl.partner(v1), lvl.partner(u1))?;
                    let back: Vec<Node> = c[2..yj].iter().rev().copied().collect();
                    self.join(lvl, &[&[s, x1], &c[yj..], &p2, &back])
                }
            }
            _ => {
                self.label(if strict { "3.1.1.1" } else { "2.1.3" });
                let (u1, y1, v1, x1) = (c[1], c[j - 1], c[j + 1], c[len - 1]);
                let tail: Vec<Node> = c[j + 1..].iter().rev().copied().collect();
                if lvl.live(u1) && lvl.live(v1) {
                    self.note_cross(lvl, v1);
                    self.note_cross(lvl, u1);
                    let p2 = self.lemma_path(&lvl.view2, lvl.partner(v1), lvl.partner(u1))?;
                    self.join(lvl, &[&[s], &tail, &p2, &c[1..j], &[t]])
                } else {
                    self.require_live(lvl, &[x1, y1])?;
                    self.note_cross(lvl, y1);
                    self.note_cross(lvl, x1);
                    let p2 = self.lemma_path(&lvl.view2, lvl.partner(y1), lvl.partner(x1))?;
                    self.join(lvl, &[&c[..j], &p2, &tail, &[t]])
                }
            }
        }
    }

    /// Both endpoints in half 2: open the cycle at a cross-edge pair and
    /// cover half 2 with two disjoint paths.
    pub(super) fn cycle_outside(
        &mut self,
        lvl: &Level,
        c1: &[Node],
        s: Node,
        t: Node,
    ) -> Result<Vec<Node>, EmbedError> {
        let len = c1.len();
        let usable = |v: Node| lvl.live(v) && lvl.partner(v) != s && lvl.partner(v) != t;
        let i = (0..len)
            .find(|&i| usable(c1[i]) && usable(c1[(i + 1) % len]))
            .ok_or_else(|| self.contradiction("no cross edge pair on the cycle".into()))?;
        let (a, b) = (c1[i], c1[(i + 1) % len]);
        self.note_cross(lvl, a);
        self.note_cross(lvl, b);
        let pair = self.lemma_pair(&lvl.view2, s, lvl.partner(a), lvl.partner(b), t)?;
        let p1 = open_cycle(c1, i);
        self.join(lvl, &[&pair.first, &p1, &pair.second])
    }

    /// `s` on the cycle, `t` in half 2.
    pub(super) fn cycle_split(
        &mut self,
        lvl: &Level,
        c1: &[Node],
        s: Node,
        t: Node,
        prefix: &str,
    ) -> Result<Vec<Node>, EmbedError> {
        let fwd = rotate(c1, s, None).ok_or_else(|| self.contradiction(format!("{s} is off the cycle")))?;
        let bwd: Vec<Node> = std::iter::once(s).chain(fwd[1..].iter().rev().copied()).collect();
        for c in [&fwd, &bwd] {
            let a = c[1];
            if lvl.live(a) && lvl.partner(a) != t {
                self.label(&format!("{prefix}.1"));
                self.note_cross(lvl, a);
                let around: Vec<Node> = c[1..].iter().rev().copied().collect();
                let p2 = self.lemma_path(&lvl.view2, lvl.partner(a), t)?;
                return self.join(lvl, &[&[s], &around, &p2]);
            }
        }
        for c in [&fwd, &bwd] {
            let (a, b) = (c[1], c[c.len() - 1]);
            if lvl.live(a) && lvl.partner(a) == t && !lvl.live(b) {
                self.label(&format!("{prefix}.2"));
                self.note_cross(lvl, a);
                let around: Vec<Node> = c[1..].iter().rev().copied().collect();
                let inner = &around[1..around.len() - 1];
                let i = 1 + self.cross_edge(lvl, inner, &[t], None)?;
                let p2 =
                    self.lemma_path(&lvl.view2.without(&[t]), lvl.partner(around[i]), lvl.partner(around[i + 1]))?;
                return self.join(lvl, &[&[s], &around[..=i], &p2, &around[i + 1..], &[t]]);
            }
        }
        Err(self.contradiction(format!("no construction for {prefix} around {s}")))
    }

    /// `t` is the low-degree witness and `s` lies on the cycle.
    fn case3_witness_end(&mut self, lvl: &Level, c1: &[Node], s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        let p = if lvl.live(t) {
            let q2 = lvl.partner(t);
            self.note_agent(t, q2);
            self.cycle_split(lvl, c1, s, q2, "2.3")?
        } else {
            let agent = self.neighbor_other_than(&lvl.view1, t, s)?;
            self.note_agent(t, agent);
            self.cycle_inside(lvl, c1, s, agent, true)?
        };
        self.relabel("3.1.2");
        self.join(lvl, &[&p, &[t]])
    }

    fn case3_split(&mut self, lvl: &Level, c1: &[Node], s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        if s != lvl.q1 {
            let p = self.cycle_split(lvl, c1, s, t, "2.3")?;
            self.relabel("3.3.1");
            return Ok(p);
        }
        let p = if lvl.live(s) && lvl.partner(s) != t {
            let q2 = lvl.partner(s);
            self.note_agent(s, q2);
            self.cycle_outside(lvl, c1, q2, t)?
        } else {
            let agent = self.neighbor_other_than(&lvl.view1, s, t)?;
            self.note_agent(s, agent);
            self.cycle_split(lvl, c1, agent, t, "2.3")?
        };
        self.relabel("3.3.2");
        self.join(lvl, &[&[s], &p])
    }
}
