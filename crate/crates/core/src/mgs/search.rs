//! Exact minimum feedback vertex set by branch and bound, enumeration of all
//! optima, and the greedy upper bound.

use std::time::Instant;

use super::bound::cycle_packing;
use super::residual::Residual;
use super::{BranchRule, GroundingSet, SolveStats, SolverConfig};
use crate::error::{Error, Result};
use crate::graph::{DefGraph, VertexId};

struct Search {
    deadline: Option<Instant>,
    rule: BranchRule,
    nodes: u64,
    timed_out: bool,
    /// Lower bound established at the first node.
    root_bound: Option<usize>,
}

impl Search {
    fn new(cfg: &SolverConfig, start: Instant) -> Self {
        Search {
            deadline: cfg.time_limit.and_then(|d| start.checked_add(d)),
            rule: cfg.branch_rule,
            nodes: 0,
            timed_out: false,
            root_bound: None,
        }
    }

    fn expired(&mut self) -> bool {
        if !self.timed_out {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.timed_out = true;
                }
            }
        }
        self.timed_out
    }

    fn pick(&self, r: &Residual) -> VertexId {
        match self.rule {
            BranchRule::Lexicographic => *r.live().first().expect("nonempty residual"),
            BranchRule::MaxDegree => {
                let mut best = None;
                let mut best_deg = 0;
                for &v in r.live() {
                    let deg = r.inn(v).len() + r.out(v).len();
                    if best.is_none() || deg > best_deg {
                        best = Some(v);
                        best_deg = deg;
                    }
                }
                best.expect("nonempty residual")
            }
        }
    }

    /// A minimum feedback vertex set of `r` if one of size `< budget`
    /// exists. `None` means no such set, or the deadline passed.
    fn solve(&mut self, mut r: Residual, budget: usize) -> Option<Vec<VertexId>> {
        self.nodes += 1;
        // The root node always runs far enough to leave a lower bound.
        let at_root = self.root_bound.is_none();
        if !at_root && self.expired() {
            return None;
        }
        let mut forced = Vec::new();
        r.reduce(&mut forced, None);
        if at_root {
            self.root_bound = Some(forced.len());
        }
        if forced.len() >= budget {
            return None;
        }
        let budget = budget - forced.len();
        let comps = r.prune_acyclic();
        if comps.is_empty() {
            return Some(forced);
        }

        if comps.len() > 1 {
            let parts: Vec<Residual> = comps.iter().map(|c| r.restricted(c)).collect();
            let lbs: Vec<usize> = parts.iter().map(|p| cycle_packing(p, self.deadline)).collect();
            let mut rest_lb: usize = lbs.iter().sum();
            if at_root {
                self.root_bound = Some(forced.len() + rest_lb);
            }
            if rest_lb >= budget {
                return None;
            }
            let mut used = 0;
            let mut solution = forced;
            for (part, lb) in parts.into_iter().zip(lbs) {
                rest_lb -= lb;
                let cap = budget - used - rest_lb;
                let sub = self.solve(part, cap)?;
                used += sub.len();
                solution.extend(sub);
            }
            return Some(solution);
        }

        let lb = cycle_packing(&r, self.deadline);
        if at_root {
            self.root_bound = Some(forced.len() + lb);
        }
        if lb >= budget {
            return None;
        }
        let v = self.pick(&r);
        let mut best: Option<Vec<VertexId>> = None;
        let mut bound = budget;

        let mut with_v = r.clone();
        with_v.delete(v);
        if let Some(mut s) = self.solve(with_v, bound - 1) {
            s.push(v);
            bound = s.len();
            best = Some(s);
        }
        // Exclude branch: v is kept out of the set, so it can be contracted
        // away by linking its predecessors to its successors.
        r.bypass(v);
        if let Some(s) = self.solve(r, bound) {
            best = Some(s);
        }
        best.map(|mut b| {
            b.extend(forced);
            b
        })
    }

    /// Depth-first enumeration of every feedback vertex set of size exactly
    /// `budget` (assumed minimum), in lexicographic order of the sorted sets.
    fn enumerate(
        &mut self,
        mut r: Residual,
        chosen: &mut Vec<VertexId>,
        budget: usize,
        cap: usize,
        out: &mut Vec<Vec<VertexId>>,
    ) {
        self.nodes += 1;
        if out.len() >= cap || self.expired() {
            return;
        }
        let mark = chosen.len();
        let loops: Vec<VertexId> = r.live().iter().copied().filter(|&v| r.has_loop(v)).collect();
        if loops.len() > budget {
            return;
        }
        for &v in &loops {
            r.delete(v);
        }
        chosen.extend(&loops);
        let budget = budget - loops.len();
        r.prune_acyclic();

        if r.is_empty() {
            if budget == 0 {
                let mut s = chosen.clone();
                s.sort_unstable();
                out.push(s);
            }
        } else if cycle_packing(&r, self.deadline) <= budget {
            // Branching on the smallest live id, include first, yields
            // solutions in lexicographic order: vertices decided by loops or
            // pruning have the same membership in every completion.
            let v = *r.live().first().unwrap();
            if budget > 0 {
                let mut with_v = r.clone();
                with_v.delete(v);
                chosen.push(v);
                self.enumerate(with_v, chosen, budget - 1, cap, out);
                chosen.pop();
            }
            r.bypass(v);
            self.enumerate(r, chosen, budget, cap, out);
        }
        chosen.truncate(mark);
    }
}

fn to_set(g: &DefGraph, ids: &[VertexId]) -> Vec<String> {
    g.words(ids)
}

/// Minimum grounding set (minimum feedback vertex set) of `g`.
///
/// The returned set is the lexicographically first optimum. If the time
/// limit expires before optimality is proven, the greedy set is returned
/// flagged non-optimal together with a lower bound.
pub fn solve_mgs(g: &DefGraph, cfg: &SolverConfig) -> Result<GroundingSet> {
    cfg.validate()?;
    let start = Instant::now();
    let greedy = greedy_ids(g);
    let mut search = Search::new(cfg, start);

    let exact = search.solve(Residual::from_graph(g), greedy.len() + 1);
    let (ids, optimal) = match exact {
        Some(ids) if !search.timed_out => (ids, true),
        _ if search.timed_out => (greedy, false),
        _ => {
            return Err(Error::Invariant(
                "branch and bound found nothing below the greedy bound".to_string(),
            ))
        }
    };

    let (ids, lower_bound) = if optimal {
        // Canonical pick: first optimum in lexicographic order. If this runs
        // out of time the branch-and-bound optimum stands.
        let k = ids.len();
        let mut found = Vec::new();
        search.enumerate(Residual::from_graph(g), &mut Vec::new(), k, 1, &mut found);
        let canonical = found.pop().unwrap_or(ids);
        (canonical, k)
    } else {
        // Vertices forced at the root plus a cycle packing of what remained.
        (ids, search.root_bound.unwrap_or(0))
    };

    let set = GroundingSet {
        words: to_set(g, &ids),
        optimal,
        lower_bound,
        stats: SolveStats {
            nodes: search.nodes,
            wall_time_secs: start.elapsed().as_secs_f64(),
            timed_out: !optimal,
        },
    };
    set.verify(g)?;
    Ok(set)
}

/// Every minimum grounding set of `g` (up to the configured cap), in
/// lexicographic order. `optimum` must be a proven optimum of `g`.
pub fn enumerate_mgs(g: &DefGraph, optimum: &GroundingSet, cfg: &SolverConfig) -> Result<Vec<GroundingSet>> {
    cfg.validate()?;
    if !optimum.optimal {
        return Err(Error::Precondition(
            "enumeration needs a proven optimum; the solve was not optimal".to_string(),
        ));
    }
    let start = Instant::now();
    let mut search = Search::new(cfg, start);
    let mut found = Vec::new();
    search.enumerate(
        Residual::from_graph(g),
        &mut Vec::new(),
        optimum.size(),
        cfg.enumeration_cap,
        &mut found,
    );
    let elapsed = start.elapsed().as_secs_f64();
    found
        .iter()
        .map(|ids| {
            let set = GroundingSet {
                words: to_set(g, ids),
                optimal: true,
                lower_bound: optimum.size(),
                stats: SolveStats {
                    nodes: search.nodes,
                    wall_time_secs: elapsed,
                    timed_out: search.timed_out,
                },
            };
            set.verify(g)?;
            Ok(set)
        })
        .collect()
}

fn greedy_ids(g: &DefGraph) -> Vec<VertexId> {
    let mut r = Residual::from_graph(g);
    let mut chosen = Vec::new();
    r.reduce(&mut chosen, None);
    while !r.is_empty() {
        let mut best = None;
        let mut best_deg = 0;
        for &v in r.live() {
            let deg = r.out(v).len();
            if best.is_none() || deg > best_deg {
                best = Some(v);
                best_deg = deg;
            }
        }
        let v = best.unwrap();
        chosen.push(v);
        let near: Vec<VertexId> = r.inn(v).iter().chain(r.out(v)).copied().filter(|&w| w != v).collect();
        r.delete(v);
        r.reduce_from(near, &mut chosen, None);
    }
    chosen
}

/// Upper bound: contraction rules, and when they stall, the live vertex with
/// the most out-arcs goes into the set.
pub fn greedy_grounding_set(g: &DefGraph) -> Result<GroundingSet> {
    let start = Instant::now();
    let ids = greedy_ids(g);
    let set = GroundingSet {
        words: to_set(g, &ids),
        optimal: false,
        lower_bound: 0,
        stats: SolveStats {
            nodes: 0,
            wall_time_secs: start.elapsed().as_secs_f64(),
            timed_out: false,
        },
    };
    set.verify(g)?;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::build_graph;

    fn cfg() -> SolverConfig {
        SolverConfig {
            enumeration_cap: 100,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn f1_optimum_is_a() {
        let g = build_graph(&fixtures::f1()).unwrap();
        let s = solve_mgs(&g, &cfg()).unwrap();
        assert!(s.optimal);
        assert_eq!(s.words, vec!["a"]);
    }

    #[test]
    fn f2_optimum_is_a_c() {
        let g = build_graph(&fixtures::f2()).unwrap();
        let s = solve_mgs(&g, &cfg()).unwrap();
        assert_eq!(s.words, vec!["a", "c"]);
        assert_eq!(s.lower_bound, 2);
    }

    #[test]
    fn enumerate_f1_and_f2() {
        let g = build_graph(&fixtures::f1()).unwrap();
        let opt = solve_mgs(&g, &cfg()).unwrap();
        let all: Vec<_> = enumerate_mgs(&g, &opt, &cfg()).unwrap().into_iter().map(|s| s.words).collect();
        assert_eq!(all, vec![vec!["a"], vec!["b"]]);

        let g = build_graph(&fixtures::f2()).unwrap();
        let opt = solve_mgs(&g, &cfg()).unwrap();
        let all: Vec<_> = enumerate_mgs(&g, &opt, &cfg()).unwrap().into_iter().map(|s| s.words).collect();
        assert_eq!(
            all,
            vec![vec!["a", "c"], vec!["a", "d"], vec!["b", "c"], vec!["b", "d"]]
        );
    }

    #[test]
    fn enumeration_cap_one() {
        let g = build_graph(&fixtures::f2()).unwrap();
        let opt = solve_mgs(&g, &cfg()).unwrap();
        let one = SolverConfig {
            enumeration_cap: 1,
            ..cfg()
        };
        assert_eq!(enumerate_mgs(&g, &opt, &one).unwrap().len(), 1);
    }

    #[test]
    fn enumeration_requires_optimum() {
        let g = build_graph(&fixtures::f1()).unwrap();
        let greedy = greedy_grounding_set(&g).unwrap();
        assert!(matches!(enumerate_mgs(&g, &greedy, &cfg()), Err(Error::Precondition(_))));
    }

    #[test]
    fn greedy_examples() {
        let g = build_graph(&fixtures::f1()).unwrap();
        let s = greedy_grounding_set(&g).unwrap();
        assert_eq!(s.size(), 1);
        assert!(!s.optimal);

        let dag = DefGraph::from_index_arcs(4, [(0, 1), (1, 2), (0, 3)]);
        assert!(greedy_grounding_set(&dag).unwrap().words.is_empty());
    }

    #[test]
    fn empty_graph() {
        let g = DefGraph::from_index_arcs(0, []);
        let s = solve_mgs(&g, &cfg()).unwrap();
        assert!(s.optimal && s.words.is_empty());
    }

    #[test]
    fn lexicographic_branching_agrees() {
        let g = build_graph(&fixtures::f2()).unwrap();
        let lex = SolverConfig {
            branch_rule: BranchRule::Lexicographic,
            ..cfg()
        };
        assert_eq!(solve_mgs(&g, &lex).unwrap().words, vec!["a", "c"]);
    }
}
