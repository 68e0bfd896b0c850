//! Grounding sets and Minimal Grounding Sets.
//!
//! A word set grounds a dictionary when every other word can be learned from
//! definitions, starting from the set. That happens exactly when the set
//! meets every definitional cycle, i.e. it is a feedback vertex set of the
//! definition graph; a minimal grounding set is a minimum one.

mod bound;
mod residual;
mod search;

use std::collections::BTreeSet;
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use residual::{reduce_instance, ReducedInstance};
pub use search::{enumerate_mgs, greedy_grounding_set, solve_mgs};

use crate::decomposition::{Decomposition, Label};
use crate::error::{Error, Result};
use crate::graph::{is_acyclic_on, DefGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundingSet {
    /// Sorted words of the set.
    pub words: Vec<String>,
    /// True when the size is proven minimum.
    pub optimal: bool,
    /// Best proven lower bound on the minimum size.
    pub lower_bound: usize,
    pub stats: SolveStats,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub nodes: u64,
    pub wall_time_secs: f64,
    pub timed_out: bool,
}

/// Flat machine-readable form of a solver result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverRecord {
    pub size: usize,
    pub optimal: bool,
    pub lower_bound: usize,
    pub wall_time_secs: f64,
    pub nodes: u64,
    pub words: Vec<String>,
}

impl GroundingSet {
    pub fn size(&self) -> usize {
        self.words.len()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.binary_search_by(|w| w.as_str().cmp(word)).is_ok()
    }

    pub fn record(&self) -> SolverRecord {
        SolverRecord {
            size: self.size(),
            optimal: self.optimal,
            lower_bound: self.lower_bound,
            wall_time_secs: self.stats.wall_time_secs,
            nodes: self.stats.nodes,
            words: self.words.clone(),
        }
    }

    pub(crate) fn verify(&self, g: &DefGraph) -> Result<()> {
        let ids = g.ids(&self.words)?;
        if !is_grounding_set(g, &ids)? {
            return Err(Error::Invariant(format!(
                "solver returned a set of {} words that does not ground the graph",
                self.size()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchRule {
    /// Branch on the live vertex with the most arcs.
    #[default]
    MaxDegree,
    /// Branch on the alphabetically first live vertex.
    Lexicographic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    /// `None` means no limit.
    pub time_limit: Option<Duration>,
    pub enumeration_cap: usize,
    pub branch_rule: BranchRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            time_limit: Some(Duration::from_secs(60)),
            enumeration_cap: 100,
            branch_rule: BranchRule::MaxDegree,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.time_limit.is_some_and(|d| d.is_zero()) {
            return Err(Error::Precondition("time limit must be positive".to_string()));
        }
        if self.enumeration_cap == 0 {
            return Err(Error::Precondition("enumeration cap must be positive".to_string()));
        }
        Ok(())
    }
}

/// Whether removing `set` leaves the definition graph acyclic.
///
/// Computed twice: by learnability closure (start from `set`, learn any word
/// whose definers are all known) and by acyclicity of the rest. A
/// disagreement is reported as an invariant violation.
pub fn is_grounding_set(g: &DefGraph, set: &BTreeSet<VertexId>) -> Result<bool> {
    let by_learning = learnable_from(g, set);
    let mut keep = vec![true; g.len()];
    for &v in set {
        if v >= g.len() {
            return Err(Error::Precondition(format!("vertex id {v} out of range")));
        }
        keep[v] = false;
    }
    let by_acyclicity = is_acyclic_on(g, &keep);
    if by_learning != by_acyclicity {
        return Err(Error::Invariant(format!(
            "learnability ({by_learning}) and acyclicity ({by_acyclicity}) disagree"
        )));
    }
    Ok(by_learning)
}

/// Word-level convenience wrapper around [`is_grounding_set`].
pub fn is_grounding_set_words<I, S>(g: &DefGraph, words: I) -> Result<bool>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    is_grounding_set(g, &g.ids(words)?)
}

fn learnable_from(g: &DefGraph, set: &BTreeSet<VertexId>) -> bool {
    let mut known = vec![false; g.len()];
    for &v in set {
        if v < g.len() {
            known[v] = true;
        }
    }
    let mut missing: Vec<usize> = g
        .vertices()
        .map(|v| g.in_arcs(v).iter().filter(|&&u| !known[u]).count())
        .collect();
    let mut ready: Vec<VertexId> = g.vertices().filter(|&v| !known[v] && missing[v] == 0).collect();
    let mut learned = set.len();
    while let Some(v) = ready.pop() {
        known[v] = true;
        learned += 1;
        for &w in g.out_arcs(v) {
            if !known[w] {
                missing[w] -= 1;
                if missing[w] == 0 {
                    ready.push(w);
                }
            }
        }
    }
    learned == g.len()
}

/// How a grounding set divides across the structural layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Straddle {
    pub in_core: usize,
    pub in_satellite: usize,
    pub outside_kernel: usize,
}

/// Counts set members per label. For a proven-minimum set every member must
/// lie in the Kernel (all cycles do); anything else is an invariant violation.
pub fn straddle_report(d: &Decomposition, s: &GroundingSet) -> Result<Straddle> {
    let mut out = Straddle::default();
    for w in &s.words {
        match d.label(w) {
            Some(Label::Core) => out.in_core += 1,
            Some(Label::Satellite) => out.in_satellite += 1,
            Some(Label::Outside) => out.outside_kernel += 1,
            None => {
                return Err(Error::Precondition(format!(
                    "{w:?} is not in the decomposed lexicon"
                )))
            }
        }
    }
    if s.optimal && out.outside_kernel > 0 {
        return Err(Error::Invariant(format!(
            "{} minimum grounding set word(s) lie outside the kernel",
            out.outside_kernel
        )));
    }
    Ok(out)
}
