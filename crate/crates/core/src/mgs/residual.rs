//! Mutable working graph for feedback-vertex-set search.
//!
//! Vertices keep their ids from the source [`DefGraph`]; because those ids are
//! in word order, "smallest live id" is "alphabetically first live word".

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{tarjan, DefGraph, VertexId};

#[derive(Debug, Clone)]
pub(crate) struct Residual {
    out: Vec<BTreeSet<VertexId>>,
    inn: Vec<BTreeSet<VertexId>>,
    alive: Vec<bool>,
    live: BTreeSet<VertexId>,
}

impl Residual {
    pub fn from_graph(g: &DefGraph) -> Self {
        Residual {
            out: g.vertices().map(|v| g.out_arcs(v).iter().copied().collect()).collect(),
            inn: g.vertices().map(|v| g.in_arcs(v).iter().copied().collect()).collect(),
            alive: vec![true; g.len()],
            live: g.vertices().collect(),
        }
    }

    /// Copy restricted to `members`, dropping arcs that leave the set.
    pub fn restricted(&self, members: &[VertexId]) -> Self {
        let n = self.alive.len();
        let keep: BTreeSet<VertexId> = members.iter().copied().collect();
        let mut out = vec![BTreeSet::new(); n];
        let mut inn = vec![BTreeSet::new(); n];
        let mut alive = vec![false; n];
        for &v in &keep {
            alive[v] = true;
            out[v] = self.out[v].intersection(&keep).copied().collect();
            inn[v] = self.inn[v].intersection(&keep).copied().collect();
        }
        Residual {
            out,
            inn,
            alive,
            live: keep,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    pub fn live(&self) -> &BTreeSet<VertexId> {
        &self.live
    }

    pub fn out(&self, v: VertexId) -> &BTreeSet<VertexId> {
        &self.out[v]
    }

    pub fn inn(&self, v: VertexId) -> &BTreeSet<VertexId> {
        &self.inn[v]
    }

    pub fn has_loop(&self, v: VertexId) -> bool {
        self.out[v].contains(&v)
    }

    pub fn arcs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.live
            .iter()
            .flat_map(move |&u| self.out[u].iter().map(move |&w| (u, w)))
    }

    pub fn delete(&mut self, v: VertexId) {
        debug_assert!(self.alive[v]);
        for w in std::mem::take(&mut self.out[v]) {
            self.inn[w].remove(&v);
        }
        for u in std::mem::take(&mut self.inn[v]) {
            self.out[u].remove(&v);
        }
        self.alive[v] = false;
        self.live.remove(&v);
    }

    /// Removes `v` while keeping every path through it: each predecessor is
    /// linked to each successor. Sound for any search that commits to
    /// leaving `v` out of the feedback set; `v` must not carry a self-loop.
    pub fn bypass(&mut self, v: VertexId) {
        debug_assert!(!self.has_loop(v));
        let preds: Vec<VertexId> = self.inn[v].iter().copied().collect();
        let succs: Vec<VertexId> = self.out[v].iter().copied().collect();
        self.delete(v);
        for &u in &preds {
            for &w in &succs {
                self.out[u].insert(w);
                self.inn[w].insert(u);
            }
        }
    }

    /// Applies the contraction rules to a fixed point:
    ///
    /// * LOOP: a vertex with a self-loop is in every solution; record and delete.
    /// * IN0/OUT0: a source or sink lies on no cycle; delete.
    /// * IN1: a vertex with one predecessor `u` is dominated by `u`; bypass it
    ///   (equivalently merge it into `u`).
    /// * OUT1: symmetric, merging into the single successor.
    ///
    /// Preserves the optimum value but not the set of optimal solutions.
    pub fn reduce(&mut self, forced: &mut Vec<VertexId>, merged: Option<&mut Vec<(VertexId, VertexId)>>) {
        let work: Vec<VertexId> = self.live.iter().rev().copied().collect();
        self.reduce_from(work, forced, merged);
    }

    /// [`Residual::reduce`] starting from the given vertices only; enough
    /// after a local change to an already reduced graph.
    pub fn reduce_from(
        &mut self,
        mut work: Vec<VertexId>,
        forced: &mut Vec<VertexId>,
        mut merged: Option<&mut Vec<(VertexId, VertexId)>>,
    ) {
        let touch = |r: &Residual, v: VertexId, work: &mut Vec<VertexId>| {
            work.extend(r.inn[v].iter().filter(|&&u| u != v));
            work.extend(r.out[v].iter().filter(|&&w| w != v));
        };
        while let Some(v) = work.pop() {
            if !self.alive[v] {
                continue;
            }
            if self.has_loop(v) {
                forced.push(v);
                touch(self, v, &mut work);
                self.delete(v);
            } else if self.inn[v].is_empty() || self.out[v].is_empty() {
                touch(self, v, &mut work);
                self.delete(v);
            } else if self.inn[v].len() == 1 || self.out[v].len() == 1 {
                let rep = if self.inn[v].len() == 1 {
                    *self.inn[v].first().unwrap()
                } else {
                    *self.out[v].first().unwrap()
                };
                if let Some(m) = merged.as_deref_mut() {
                    m.push((v, rep));
                }
                touch(self, v, &mut work);
                self.bypass(v);
            }
        }
    }

    /// Deletes every vertex that lies on no cycle and every arc joining two
    /// different strongly connected components. Neither can matter to a
    /// minimum feedback vertex set, so all optima are preserved. Returns the
    /// remaining components, each sorted, ordered by smallest member.
    pub fn prune_acyclic(&mut self) -> Vec<Vec<VertexId>> {
        let n = self.alive.len();
        let alive = &self.alive;
        let out = &self.out;
        let comps = tarjan(n, |v| alive[v], |v| out[v].iter().copied());
        let mut comp_of = vec![usize::MAX; n];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = i;
            }
        }
        let mut kept = Vec::new();
        for c in comps {
            if c.len() == 1 && !self.has_loop(c[0]) {
                self.delete(c[0]);
            } else {
                let mut c = c;
                c.sort_unstable();
                kept.push(c);
            }
        }
        for comp in &kept {
            for &u in comp {
                let cross: Vec<VertexId> = self.out[u]
                    .iter()
                    .copied()
                    .filter(|&w| comp_of[w] != comp_of[u])
                    .collect();
                for w in cross {
                    self.out[u].remove(&w);
                    self.inn[w].remove(&u);
                }
            }
        }
        kept.sort_unstable_by_key(|c| c[0]);
        kept
    }

    /// Export as a standalone graph named after the source graph.
    pub fn to_graph(&self, names: &DefGraph) -> DefGraph {
        let verts: Vec<String> = self.live.iter().map(|&v| names.name(v).to_string()).collect();
        let arcs: Vec<(&str, &str)> = self
            .arcs()
            .map(|(u, w)| (names.name(u), names.name(w)))
            .collect();
        DefGraph::from_arcs(verts, arcs).expect("residual arcs join live vertices")
    }
}

/// Residual graph left by the contraction rules, with the vertices they
/// force into every solution and the merge trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedInstance {
    pub residual: DefGraph,
    pub forced_in: BTreeSet<String>,
    /// Each contracted word mapped to the word it was merged into.
    pub merged_into: BTreeMap<String, String>,
}

impl ReducedInstance {
    /// Follows the merge trace to the word that finally absorbed `word`.
    pub fn representative<'a>(&'a self, mut word: &'a str) -> &'a str {
        while let Some(next) = self.merged_into.get(word) {
            word = next;
        }
        word
    }
}

pub fn reduce_instance(g: &DefGraph) -> ReducedInstance {
    let mut r = Residual::from_graph(g);
    let mut forced = Vec::new();
    let mut merged = Vec::new();
    r.reduce(&mut forced, Some(&mut merged));
    ReducedInstance {
        residual: r.to_graph(g),
        forced_in: forced.iter().map(|&v| g.name(v).to_string()).collect(),
        merged_into: merged
            .into_iter()
            .map(|(v, rep)| (g.name(v).to_string(), g.name(rep).to_string()))
            .collect(),
    }
}
