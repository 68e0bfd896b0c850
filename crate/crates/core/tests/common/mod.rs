//! Reference implementations used as test oracles. None of them share code
//! with the library beyond reading a graph's arcs.

#![allow(dead_code)]

use std::collections::BTreeSet;

use lexikernel::DefGraph;

pub fn adjacency(g: &DefGraph) -> Vec<Vec<usize>> {
    g.vertices().map(|v| g.out_arcs(v).to_vec()).collect()
}

/// Cycle check by three-color depth-first search over the kept vertices.
pub fn has_cycle(adj: &[Vec<usize>], keep: &[bool]) -> bool {
    fn visit(v: usize, adj: &[Vec<usize>], keep: &[bool], color: &mut [u8]) -> bool {
        color[v] = 1;
        for &w in &adj[v] {
            if !keep[w] {
                continue;
            }
            if color[w] == 1 || (color[w] == 0 && visit(w, adj, keep, color)) {
                return true;
            }
        }
        color[v] = 2;
        false
    }
    let mut color = vec![0u8; adj.len()];
    (0..adj.len()).any(|v| keep[v] && color[v] == 0 && visit(v, adj, keep, &mut color))
}

pub fn is_fvs(adj: &[Vec<usize>], mask: u32) -> bool {
    let keep: Vec<bool> = (0..adj.len()).map(|v| mask & (1 << v) == 0).collect();
    !has_cycle(adj, &keep)
}

/// Minimum feedback vertex set size by trying every subset.
pub fn brute_min_fvs(adj: &[Vec<usize>]) -> usize {
    let n = adj.len();
    (0u32..1 << n)
        .filter(|&m| is_fvs(adj, m))
        .map(|m| m.count_ones() as usize)
        .min()
        .unwrap_or(0)
}

/// Every minimum feedback vertex set, as sorted vertex lists.
pub fn brute_all_min_fvs(adj: &[Vec<usize>]) -> BTreeSet<Vec<usize>> {
    let n = adj.len();
    let k = brute_min_fvs(adj);
    (0u32..1 << n)
        .filter(|&m| m.count_ones() as usize == k && is_fvs(adj, m))
        .map(|m| (0..n).filter(|&v| m & (1 << v) != 0).collect())
        .collect()
}

/// Vertices reachable from `v` by one or more arcs.
pub fn reach_plus(adj: &[Vec<usize>], v: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack: Vec<usize> = adj[v].clone();
    while let Some(u) = stack.pop() {
        if !seen[u] {
            seen[u] = true;
            stack.extend(&adj[u]);
        }
    }
    seen
}

/// Vertices with a path (possibly empty) to some vertex on a cycle.
pub fn reaching_cycle(adj: &[Vec<usize>]) -> BTreeSet<usize> {
    let n = adj.len();
    let reach: Vec<Vec<bool>> = (0..n).map(|v| reach_plus(adj, v)).collect();
    let on_cycle: Vec<bool> = (0..n).map(|v| reach[v][v]).collect();
    (0..n)
        .filter(|&v| on_cycle[v] || (0..n).any(|w| reach[v][w] && on_cycle[w]))
        .collect()
}

/// Strongly connected components by mutual reachability, as a component id
/// per vertex (the smallest member).
pub fn scc_by_reachability(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let reach: Vec<Vec<bool>> = (0..n).map(|v| reach_plus(adj, v)).collect();
    (0..n)
        .map(|v| (0..n).find(|&w| w == v || (reach[v][w] && reach[w][v])).unwrap())
        .collect()
}

/// Learnability: starting from `set`, learn any word all of whose defining
/// words are known; grounding when everything gets learned.
pub fn grounds_by_learning(g: &DefGraph, set: &BTreeSet<usize>) -> bool {
    let mut known: Vec<bool> = g.vertices().map(|v| set.contains(&v)).collect();
    loop {
        let mut changed = false;
        for v in g.vertices() {
            if !known[v] && g.in_arcs(v).iter().all(|&u| known[u]) {
                known[v] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    known.iter().all(|&k| k)
}

pub fn grounds_by_acyclicity(g: &DefGraph, set: &BTreeSet<usize>) -> bool {
    let keep: Vec<bool> = g.vertices().map(|v| !set.contains(&v)).collect();
    !has_cycle(&adjacency(g), &keep)
}

/// Log gamma by the Lanczos approximation (g = 7, 9 terms).
pub fn ln_gamma(x: f64) -> f64 {
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return (std::f64::consts::PI / (std::f64::consts::PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + 7.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// F-distribution CDF by composite Simpson integration of the density after
/// substituting `x = t^2`, which removes the singularity at zero for d1 = 1.
pub fn f_cdf_by_integration(f: f64, d1: f64, d2: f64) -> f64 {
    let ln_b = ln_gamma(d1 / 2.0) + ln_gamma(d2 / 2.0) - ln_gamma((d1 + d2) / 2.0);
    let density = |x: f64| -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let ln = 0.5 * (d1 * (d1 * x).ln() + d2 * d2.ln() - (d1 + d2) * (d1 * x + d2).ln()) - x.ln() - ln_b;
        ln.exp()
    };
    // g(t) = 2 t f(t^2); at t = 0 it tends to a finite limit for d1 = 1 and 0 above.
    let g = |t: f64| -> f64 {
        if t == 0.0 {
            if d1 == 1.0 {
                2.0 * (0.5 * (d1.ln() + d2 * d2.ln() - (d1 + d2) * d2.ln()) - ln_b).exp()
            } else {
                0.0
            }
        } else {
            2.0 * t * density(t * t)
        }
    };
    let upper = f.sqrt();
    let m = 20_000;
    let h = upper / m as f64;
    let mut s = g(0.0) + g(upper);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * g(i as f64 * h);
    }
    s * h / 3.0
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, p);
        b.swap(col, p);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

pub fn zscore(x: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let sd = (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    x.iter().map(|v| (v - m) / sd).collect()
}

/// Standardized OLS coefficients via the normal equations.
pub fn normal_equation_betas(y: &[f64], cols: &[Vec<f64>]) -> Vec<f64> {
    let zy = zscore(y);
    let zx: Vec<Vec<f64>> = cols.iter().map(|c| zscore(c)).collect();
    let k = zx.len();
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for i in 0..k {
        for j in 0..k {
            xtx[i][j] = zx[i].iter().zip(&zx[j]).map(|(a, b)| a * b).sum();
        }
        xty[i] = zx[i].iter().zip(&zy).map(|(a, b)| a * b).sum();
    }
    solve_linear(xtx, xty)
}

/// Pooled-variance two-sample t statistic.
pub fn pooled_t(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let ma = a.iter().sum::<f64>() / na;
    let mb = b.iter().sum::<f64>() / nb;
    let ssa: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let ssb: f64 = b.iter().map(|x| (x - mb).powi(2)).sum();
    let sp2 = (ssa + ssb) / (na + nb - 2.0);
    (ma - mb) / (sp2 * (1.0 / na + 1.0 / nb)).sqrt()
}
