//! The definition graph: one vertex per headword, an arc `u -> v` whenever
//! `u` occurs in the definition of `v` (definer to defined).
//!
//! Vertex ids are assigned in lexicographic order of the words, so iterating
//! ids in increasing order is iterating words alphabetically. Adjacency lists
//! are sorted and free of duplicates.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;

pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefGraph {
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    out: Vec<Vec<VertexId>>,
    inn: Vec<Vec<VertexId>>,
}

/// Builds the definition graph of a closed lexicon.
pub fn build_graph(lex: &Lexicon) -> Result<DefGraph> {
    if !lex.is_closed() {
        return Err(Error::Precondition(
            "build_graph requires a closed lexicon".to_string(),
        ));
    }
    let names: Vec<String> = lex.headwords().map(str::to_owned).collect();
    let mut arcs = Vec::new();
    for entry in lex.entries() {
        for definer in &entry.definition {
            arcs.push((definer.as_str(), entry.headword.as_str()));
        }
    }
    DefGraph::from_arcs(names, arcs)
}

impl DefGraph {
    /// Builds a graph over `vertices` with the given `(from, to)` arcs.
    /// Duplicate vertices and arcs are collapsed; arcs naming an unknown
    /// vertex are rejected.
    pub fn from_arcs<V, S, A, T>(vertices: V, arcs: A) -> Result<Self>
    where
        V: IntoIterator<Item = S>,
        S: Into<String>,
        A: IntoIterator<Item = (T, T)>,
        T: AsRef<str>,
    {
        let names: BTreeSet<String> = vertices.into_iter().map(Into::into).collect();
        let names: Vec<String> = names.into_iter().collect();
        let index: HashMap<String, VertexId> = names
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        let mut pairs = Vec::new();
        for (u, v) in arcs {
            let (u, v) = (u.as_ref(), v.as_ref());
            let lookup = |w: &str| {
                index.get(w).copied().ok_or_else(|| {
                    Error::Precondition(format!("arc {u:?} -> {v:?} names unknown vertex {w:?}"))
                })
            };
            pairs.push((lookup(u)?, lookup(v)?));
        }
        Ok(Self::assemble(names, index, pairs))
    }

    /// Builds a graph on ids `0..n` named by zero-padded numbers so that name
    /// order equals id order.
    pub fn from_index_arcs(n: usize, arcs: impl IntoIterator<Item = (VertexId, VertexId)>) -> Self {
        let width = n.saturating_sub(1).to_string().len().max(1);
        let names: Vec<String> = (0..n).map(|i| format!("v{i:0width$}")).collect();
        let index = names.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let pairs: Vec<_> = arcs.into_iter().inspect(|&(u, v)| assert!(u < n && v < n)).collect();
        Self::assemble(names, index, pairs)
    }

    fn assemble(
        names: Vec<String>,
        index: HashMap<String, VertexId>,
        mut pairs: Vec<(VertexId, VertexId)>,
    ) -> Self {
        let n = names.len();
        pairs.sort_unstable();
        pairs.dedup();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for &(u, v) in &pairs {
            out[u].push(v);
        }
        pairs.sort_unstable_by_key(|&(u, v)| (v, u));
        for &(u, v) in &pairs {
            inn[v].push(u);
        }
        DefGraph {
            names,
            index,
            out,
            inn,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.names.len()
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id(&self, word: &str) -> Option<VertexId> {
        self.index.get(word).copied()
    }

    /// Words this vertex helps define.
    pub fn out_arcs(&self, v: VertexId) -> &[VertexId] {
        &self.out[v]
    }

    /// Words in this vertex's definition.
    pub fn in_arcs(&self, v: VertexId) -> &[VertexId] {
        &self.inn[v]
    }

    pub fn has_arc(&self, u: VertexId, v: VertexId) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    pub fn has_self_loop(&self, v: VertexId) -> bool {
        self.has_arc(v, v)
    }

    /// All arcs in `(from, to)` order.
    pub fn arcs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    /// Resolves words to ids, failing on the first unknown word.
    pub fn ids<I, S>(&self, words: I) -> Result<BTreeSet<VertexId>>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        words
            .into_iter()
            .map(|w| {
                let w = w.as_ref();
                self.id(w)
                    .ok_or_else(|| Error::Precondition(format!("{w:?} is not a vertex")))
            })
            .collect()
    }

    /// Words for the given ids, in id (alphabetical) order.
    pub fn words<'a>(&'a self, ids: impl IntoIterator<Item = &'a VertexId>) -> Vec<String> {
        let sorted: BTreeSet<VertexId> = ids.into_iter().copied().collect();
        sorted.into_iter().map(|v| self.names[v].clone()).collect()
    }

    /// Subgraph induced on `keep`, with fresh ids, plus the map from new ids
    /// back to ids of `self`.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> (DefGraph, Vec<VertexId>) {
        let back: Vec<VertexId> = keep.iter().copied().collect();
        let mut fwd = vec![usize::MAX; self.len()];
        for (new, &old) in back.iter().enumerate() {
            fwd[old] = new;
        }
        let names: Vec<String> = back.iter().map(|&v| self.names[v].clone()).collect();
        let index = names.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let pairs = self
            .arcs()
            .filter(|&(u, v)| fwd[u] != usize::MAX && fwd[v] != usize::MAX)
            .map(|(u, v)| (fwd[u], fwd[v]))
            .collect();
        (Self::assemble(names, index, pairs), back)
    }
}

/// Partition of the vertices into strongly connected components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccPartition {
    component_of: Vec<usize>,
    components: Vec<Vec<VertexId>>,
}

impl SccPartition {
    pub fn component_of(&self, v: VertexId) -> usize {
        self.component_of[v]
    }

    /// Components ordered by their smallest member; members sorted.
    pub fn components(&self) -> &[Vec<VertexId>] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.component_of.len()
    }
}

/// Iterative Tarjan over vertices `0..n` for which `active` holds.
/// Components come out in reverse topological order with unsorted members.
pub(crate) fn tarjan<F, I>(n: usize, active: impl Fn(usize) -> bool, succ: F) -> Vec<Vec<usize>>
where
    F: Fn(usize) -> I,
    I: Iterator<Item = usize>,
{
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut call: Vec<(usize, I)> = Vec::new();
    let mut next = 0usize;
    let mut out = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN || !active(root) {
            continue;
        }
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, succ(root)));

        while let Some((v, iter)) = call.last_mut() {
            let v = *v;
            match iter.next() {
                Some(w) if !active(w) => {}
                Some(w) if index[w] == UNSEEN => {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, succ(w)));
                }
                Some(w) => {
                    if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                }
                None => {
                    call.pop();
                    if let Some((parent, _)) = call.last() {
                        let parent = *parent;
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack underflow");
                            on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        out.push(comp);
                    }
                }
            }
        }
    }
    out
}

/// Strongly connected components with deterministic ordering.
pub fn compute_sccs(g: &DefGraph) -> SccPartition {
    let mut components = tarjan(g.len(), |_| true, |v| g.out_arcs(v).iter().copied());
    for c in &mut components {
        c.sort_unstable();
    }
    components.sort_unstable_by_key(|c| c[0]);
    let mut component_of = vec![0; g.len()];
    for (i, c) in components.iter().enumerate() {
        for &v in c {
            component_of[v] = i;
        }
    }
    SccPartition {
        component_of,
        components,
    }
}

/// Quotient of a graph by its SCC partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condensation {
    node_count: usize,
    arcs: BTreeSet<(usize, usize)>,
}

impl Condensation {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Arcs between distinct components, sorted.
    pub fn arcs(&self) -> &BTreeSet<(usize, usize)> {
        &self.arcs
    }

    pub fn in_degree(&self, c: usize) -> usize {
        self.arcs.iter().filter(|&&(_, to)| to == c).count()
    }

    /// Components without incoming arcs.
    pub fn sources(&self) -> Vec<usize> {
        let mut has_in = vec![false; self.node_count];
        for &(_, to) in &self.arcs {
            has_in[to] = true;
        }
        (0..self.node_count).filter(|&c| !has_in[c]).collect()
    }

    /// A topological order of the components, or `None` if a cycle exists.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.node_count];
        let mut succ = vec![Vec::new(); self.node_count];
        for &(a, b) in &self.arcs {
            indeg[b] += 1;
            succ[a].push(b);
        }
        let mut ready: Vec<usize> = (0..self.node_count).filter(|&c| indeg[c] == 0).collect();
        let mut order = Vec::with_capacity(self.node_count);
        while let Some(c) = ready.pop() {
            order.push(c);
            for &d in &succ[c] {
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    ready.push(d);
                }
            }
        }
        (order.len() == self.node_count).then_some(order)
    }
}

pub fn condense(g: &DefGraph, p: &SccPartition) -> Result<Condensation> {
    if p.vertex_count() != g.len() {
        return Err(Error::Precondition(format!(
            "partition covers {} vertices but the graph has {}",
            p.vertex_count(),
            g.len()
        )));
    }
    if compute_sccs(g) != *p {
        return Err(Error::Precondition(
            "partition is not the SCC partition of this graph".to_string(),
        ));
    }
    let arcs = g
        .arcs()
        .map(|(u, v)| (p.component_of(u), p.component_of(v)))
        .filter(|(a, b)| a != b)
        .collect();
    Ok(Condensation {
        node_count: p.len(),
        arcs,
    })
}

/// Vertices from which a directed cycle (self-loops included) is reachable
/// along out-arcs. Computed by backward search from every vertex that lies
/// on a cycle.
pub fn vertices_reaching_cycle(g: &DefGraph) -> BTreeSet<VertexId> {
    let sccs = compute_sccs(g);
    let mut reach = vec![false; g.len()];
    let mut queue: Vec<VertexId> = Vec::new();
    for comp in sccs.components() {
        let cyclic = comp.len() > 1 || g.has_self_loop(comp[0]);
        if cyclic {
            for &v in comp {
                reach[v] = true;
                queue.push(v);
            }
        }
    }
    while let Some(v) = queue.pop() {
        for &u in g.in_arcs(v) {
            if !reach[u] {
                reach[u] = true;
                queue.push(u);
            }
        }
    }
    g.vertices().filter(|&v| reach[v]).collect()
}

/// True iff the subgraph induced on vertices with `keep[v]` has no cycle.
pub fn is_acyclic_on(g: &DefGraph, keep: &[bool]) -> bool {
    let mut indeg = vec![0usize; g.len()];
    let mut remaining = 0usize;
    for v in g.vertices().filter(|&v| keep[v]) {
        remaining += 1;
        indeg[v] = g.in_arcs(v).iter().filter(|&&u| keep[u]).count();
    }
    let mut ready: Vec<VertexId> = g.vertices().filter(|&v| keep[v] && indeg[v] == 0).collect();
    while let Some(v) = ready.pop() {
        remaining -= 1;
        for &w in g.out_arcs(v) {
            if keep[w] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(w);
                }
            }
        }
    }
    remaining == 0
}
