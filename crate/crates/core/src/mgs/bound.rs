//! Lower bound from a greedy packing of vertex-disjoint cycles: each cycle in
//! the packing needs its own feedback vertex.

use std::collections::VecDeque;
use std::time::Instant;

use super::residual::Residual;
use crate::graph::VertexId;

/// Size of a greedily built set of vertex-disjoint cycles. Self-loops and
/// 2-cycles are taken first, then a shortest cycle through each remaining
/// vertex in id order. Past `deadline` the packing stops early; the partial
/// count is still a valid bound.
pub(crate) fn cycle_packing(r: &Residual, deadline: Option<Instant>) -> usize {
    let n = r.live().last().map_or(0, |&v| v + 1);
    let mut used = vec![false; n];
    let mut count = 0;

    for &v in r.live() {
        if r.has_loop(v) {
            used[v] = true;
            count += 1;
        }
    }
    for &v in r.live() {
        if used[v] {
            continue;
        }
        if let Some(&w) = r.out(v).iter().find(|&&w| !used[w] && r.out(w).contains(&v)) {
            used[v] = true;
            used[w] = true;
            count += 1;
        }
    }

    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut touched: Vec<VertexId> = Vec::new();
    let mut queue = VecDeque::new();
    for (i, &root) in r.live().iter().enumerate() {
        if used[root] {
            continue;
        }
        if i % 32 == 0 && deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        for &t in &touched {
            seen[t] = false;
        }
        touched.clear();
        queue.clear();
        queue.push_back(root);
        seen[root] = true;
        touched.push(root);
        let mut closing = None;
        'bfs: while let Some(u) = queue.pop_front() {
            for &w in r.out(u) {
                if used[w] {
                    continue;
                }
                if w == root {
                    closing = Some(u);
                    break 'bfs;
                }
                if !seen[w] {
                    seen[w] = true;
                    touched.push(w);
                    parent[w] = u;
                    queue.push_back(w);
                }
            }
        }
        if let Some(mut u) = closing {
            count += 1;
            while u != root {
                used[u] = true;
                u = parent[u];
            }
            used[root] = true;
        }
    }
    count
}
