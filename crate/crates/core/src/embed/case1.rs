//! Case 1: half 1 is within the recursive fault budget.

use super::{other_neighbor, reversed, EmbedError, Embedder, Level};
use crate::topology::Node;

impl Embedder<'_> {
    pub fn solve_case1(&mut self, lvl: &Level, s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        match (lvl.in_half1(s), lvl.in_half1(t)) {
            (true, true) => self.case1_inside(lvl, s, t),
            (false, false) => self.case1_outside(lvl, s, t),
            (true, false) => self.case1_split(lvl, s, t),
            (false, true) => Ok(reversed(self.case1_split(lvl, t, s)?)),
        }
    }

    fn case1_inside(&mut self, lvl: &Level, s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        let s_ok = other_neighbor(&lvl.view1, s, t).is_some();
        let t_ok = other_neighbor(&lvl.view1, t, s).is_some();
        match (s_ok, t_ok) {
            (true, true) => {
                self.label("1.1.1");
                let p1 = self.solve(lvl.half1, s, t)?;
                self.insert_half2(lvl, &p1, &[])
            }
            (true, false) => self.case1_stranded(lvl, s, t),
            (false, true) => Ok(reversed(self.case1_stranded(lvl, t, s)?)),
            (false, false) => Err(self.contradiction("both endpoints stranded in half 1".into())),
        }
    }

    /// Splits `path` (inside one half) at its first edge whose cross
    /// partners are usable and threads a hamiltonian path of the other half
    /// through them.
    pub(super) fn insert_half2(
        &mut self,
        lvl: &Level,
        path: &[Node],
        exclude: &[Node],
    ) -> Result<Vec<Node>, EmbedError> {
        let i = self.cross_edge(lvl, path, exclude, None)?;
        let p2 = self.lemma_path(&lvl.view2, lvl.partner(path[i]), lvl.partner(path[i + 1]))?;
        self.join(lvl, &[&path[..=i], &p2, &path[i + 1..]])
    }

    /// `t`'s only possible neighbor in half 1 is `s`, so `t` is entered from
    /// its cross partner.
    fn case1_stranded(&mut self, lvl: &Level, s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        self.label("1.1.2");
        self.require_live(lvl, &[t])?;
        let u1 = lvl
            .view1
            .nodes()
            .iter()
            .copied()
            .find(|&u| {
                u != s
                    && u != t
                    && lvl.live(u)
                    && other_neighbor(&lvl.view1, s, u).is_some()
                    && other_neighbor(&lvl.view1, u, s).is_some()
            })
            .ok_or_else(|| self.contradiction("no cross edge for 1.1.2".into()))?;
        self.note_cross(lvl, u1);
        self.note_cross(lvl, t);
        let p1 = self.solve(lvl.half1, s, u1)?;
        if p1.contains(&t) || p1.len() + 1 != lvl.view1.len() {
            return Err(self.contradiction(format!("1.1.2: recursive path must miss exactly {t}")));
        }
        let p2 = self.lemma_path(&lvl.view2, lvl.partner(u1), lvl.partner(t))?;
        self.join(lvl, &[&p1, &p2, &[t]])
    }

    fn case1_outside(&mut self, lvl: &Level, s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        self.label("1.2");
        let p2 = self.lemma_path(&lvl.view2, s, t)?;
        let i = self.cross_edge(lvl, &p2, &[], Some(&lvl.view1))?;
        let p1 = self.solve(lvl.half1, lvl.partner(p2[i]), lvl.partner(p2[i + 1]))?;
        self.join(lvl, &[&p2[..=i], &p1, &p2[i + 1..]])
    }

    fn case1_split(&mut self, lvl: &Level, s: Node, t: Node) -> Result<Vec<Node>, EmbedError> {
        self.label("1.3");
        let u1 = lvl
            .view1
            .nodes()
            .iter()
            .copied()
            .find(|&u| {
                u != s
                    && lvl.live(u)
                    && lvl.partner(u) != t
                    && lvl.view1.degree(u) >= 2
                    && other_neighbor(&lvl.view1, s, u).is_some()
            })
            .ok_or_else(|| self.contradiction("no cross edge for 1.3".into()))?;
        self.note_cross(lvl, u1);
        let p1 = self.solve(lvl.half1, s, u1)?;
        let p2 = self.lemma_path(&lvl.view2, lvl.partner(u1), t)?;
        self.join(lvl, &[&p1, &p2])
    }
}
