//! Kernel / Core / Satellite decomposition of a definition graph.
//!
//! The Kernel is what survives repeatedly deleting words that define no
//! remaining word. Restricted to the Kernel, the Core is the union of the
//! strongly connected components that receive no arc from another Kernel
//! component; the Satellites are the rest of the Kernel.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_graph, compute_sccs, condense, DefGraph, VertexId};
use crate::lexicon::Lexicon;
use crate::mgs::{is_grounding_set, GroundingSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Label {
    Outside,
    Satellite,
    Core,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Outside => "OUTSIDE",
            Label::Satellite => "SATELLITE",
            Label::Core => "CORE",
        }
    }

    pub fn in_kernel(self) -> bool {
        self != Label::Outside
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "OUTSIDE" => Ok(Label::Outside),
            "SATELLITE" => Ok(Label::Satellite),
            "CORE" => Ok(Label::Core),
            other => Err(format!("unknown label {other:?}")),
        }
    }
}

/// Per-word structural label plus the SCCs making up the Core.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    labels: BTreeMap<String, Label>,
    core_components: Vec<Vec<String>>,
}

impl Decomposition {
    pub fn label(&self, word: &str) -> Option<Label> {
        self.labels.get(word).copied()
    }

    pub fn labels(&self) -> &BTreeMap<String, Label> {
        &self.labels
    }

    pub fn words_with(&self, label: Label) -> BTreeSet<&str> {
        self.labels
            .iter()
            .filter(|(_, &l)| l == label)
            .map(|(w, _)| w.as_str())
            .collect()
    }

    pub fn kernel(&self) -> BTreeSet<&str> {
        self.labels
            .iter()
            .filter(|(_, l)| l.in_kernel())
            .map(|(w, _)| w.as_str())
            .collect()
    }

    pub fn core(&self) -> BTreeSet<&str> {
        self.words_with(Label::Core)
    }

    pub fn satellites(&self) -> BTreeSet<&str> {
        self.words_with(Label::Satellite)
    }

    pub fn core_components(&self) -> &[Vec<String>] {
        &self.core_components
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Tab-separated `word<TAB>LABEL` lines in word order.
    pub fn to_label_tsv(&self) -> String {
        let mut out = String::new();
        for (w, l) in &self.labels {
            out.push_str(w);
            out.push('\t');
            out.push_str(l.as_str());
            out.push('\n');
        }
        out
    }

    /// Reads labels written by [`Decomposition::to_label_tsv`].
    pub fn labels_from_tsv(text: &str) -> Result<BTreeMap<String, Label>> {
        let mut labels = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            let (Some(word), Some(label)) = (parts.next(), parts.next()) else {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "expected word<TAB>label".to_string(),
                });
            };
            let label = label.parse::<Label>().map_err(|message| Error::Parse {
                line: i + 1,
                message,
            })?;
            labels.insert(word.to_string(), label);
        }
        Ok(labels)
    }
}

/// Result of splitting a Kernel into Core and Satellites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreSplit {
    pub core: BTreeSet<VertexId>,
    pub satellites: BTreeSet<VertexId>,
    /// Source components of the Kernel's condensation, by smallest member.
    pub core_components: Vec<Vec<VertexId>>,
    pub core_is_single_scc: bool,
    /// Core components that are a single vertex without a self-loop. These
    /// only arise from words with an empty definition.
    pub acyclic_core_components: usize,
}

/// Kernel by sink pruning with a worklist.
pub fn extract_kernel(g: &DefGraph) -> BTreeSet<VertexId> {
    let mut outdeg: Vec<usize> = g.vertices().map(|v| g.out_arcs(v).len()).collect();
    let mut removed = vec![false; g.len()];
    let mut sinks: Vec<VertexId> = g.vertices().filter(|&v| outdeg[v] == 0).collect();
    while let Some(v) = sinks.pop() {
        removed[v] = true;
        for &u in g.in_arcs(v) {
            if u != v && !removed[u] {
                outdeg[u] -= 1;
                if outdeg[u] == 0 {
                    sinks.push(u);
                }
            }
        }
    }
    g.vertices().filter(|&v| !removed[v]).collect()
}

/// Kernel by sweeping vertices in the given order, deleting any vertex with
/// no remaining out-arc, until a sweep changes nothing. `order` must be a
/// permutation of the vertex ids.
pub fn extract_kernel_in_order(g: &DefGraph, order: &[VertexId]) -> BTreeSet<VertexId> {
    assert_eq!(order.len(), g.len(), "order must list every vertex once");
    let mut alive = vec![true; g.len()];
    loop {
        let mut changed = false;
        for &v in order {
            if alive[v] && !g.out_arcs(v).iter().any(|&w| alive[w]) {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    g.vertices().filter(|&v| alive[v]).collect()
}

pub fn split_core_satellites(g: &DefGraph, kernel: &BTreeSet<VertexId>) -> Result<CoreSplit> {
    for &v in kernel {
        if v >= g.len() {
            return Err(Error::Precondition(format!("vertex id {v} out of range")));
        }
        if !g.out_arcs(v).iter().any(|w| kernel.contains(w)) {
            return Err(Error::Precondition(format!(
                "{:?} has no out-arc inside the kernel; not a pruning fixed point",
                g.name(v)
            )));
        }
    }

    let (sub, back) = g.induced(kernel);
    let sccs = compute_sccs(&sub);
    let quotient = condense(&sub, &sccs)?;

    let mut core = BTreeSet::new();
    let mut core_components = Vec::new();
    let mut acyclic = 0;
    for c in quotient.sources() {
        let members: Vec<VertexId> = sccs.components()[c].iter().map(|&v| back[v]).collect();
        if members.len() == 1 && !g.has_self_loop(members[0]) {
            acyclic += 1;
        }
        core.extend(members.iter().copied());
        core_components.push(members);
    }
    let satellites = kernel.difference(&core).copied().collect();
    Ok(CoreSplit {
        core_is_single_scc: core_components.len() == 1,
        core,
        satellites,
        core_components,
        acyclic_core_components: acyclic,
    })
}

/// True iff every word of `words` is defined using only words of `words`.
pub fn is_def_closed<I, S>(lex: &Lexicon, words: I) -> Result<bool>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let set: BTreeSet<String> = words.into_iter().map(|w| w.as_ref().to_owned()).collect();
    let mut closed = true;
    for w in &set {
        let def = lex
            .definition(w)
            .ok_or_else(|| Error::Precondition(format!("{w:?} is not a headword")))?;
        if !def.iter().all(|t| set.contains(t)) {
            closed = false;
        }
    }
    Ok(closed)
}

/// Runs graph construction, kernel extraction and the Core split.
pub fn decompose_full(lex: &Lexicon) -> Result<(Decomposition, StructureReport)> {
    let g = build_graph(lex)?;
    decompose_graph(&g)
}

pub fn decompose_graph(g: &DefGraph) -> Result<(Decomposition, StructureReport)> {
    let kernel = extract_kernel(g);
    let split = split_core_satellites(g, &kernel)?;

    let mut labels = BTreeMap::new();
    for v in g.vertices() {
        let label = if split.core.contains(&v) {
            Label::Core
        } else if split.satellites.contains(&v) {
            Label::Satellite
        } else {
            Label::Outside
        };
        labels.insert(g.name(v).to_string(), label);
    }
    let decomposition = Decomposition {
        labels,
        core_components: split.core_components.iter().map(|c| g.words(c)).collect(),
    };

    let kernel_is_grounding_set = is_grounding_set(g, &kernel)?;
    let report = StructureReport::new(
        g.len(),
        kernel.len(),
        split.satellites.len(),
        split.core.len(),
        split.core_is_single_scc,
        kernel_is_grounding_set,
    );
    Ok((decomposition, report))
}

/// Word count with whole-percent shares of D and K.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRow {
    pub words: usize,
    pub pct_d: u32,
    pub pct_k: Option<u32>,
}

/// Round-half-up whole percent; zero when the total is zero.
pub fn whole_percent(count: usize, total: usize) -> u32 {
    if total == 0 {
        return 0;
    }
    ((200 * count as u128 + total as u128) / (2 * total as u128)) as u32
}

/// Counts and shares for D, K, S, C (and optionally an MGS).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub dictionary: usize,
    pub kernel: CountRow,
    pub satellites: CountRow,
    pub core: CountRow,
    pub mgs: Option<MgsRow>,
    pub core_is_single_scc: bool,
    pub kernel_is_grounding_set: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MgsRow {
    pub row: CountRow,
    pub optimal: bool,
}

impl StructureReport {
    pub fn new(
        dictionary: usize,
        kernel: usize,
        satellites: usize,
        core: usize,
        core_is_single_scc: bool,
        kernel_is_grounding_set: bool,
    ) -> Self {
        let row = |n: usize, with_k: bool| CountRow {
            words: n,
            pct_d: whole_percent(n, dictionary),
            pct_k: with_k.then(|| whole_percent(n, kernel)),
        };
        StructureReport {
            dictionary,
            kernel: row(kernel, false),
            satellites: row(satellites, true),
            core: row(core, true),
            mgs: None,
            core_is_single_scc,
            kernel_is_grounding_set,
        }
    }

    pub fn with_mgs(mut self, set: &GroundingSet) -> Self {
        self.mgs = Some(MgsRow {
            row: CountRow {
                words: set.size(),
                pct_d: whole_percent(set.size(), self.dictionary),
                pct_k: Some(whole_percent(set.size(), self.kernel.words)),
            },
            optimal: set.optimal,
        });
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for StructureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pct = |p: Option<u32>| p.map(|p| format!("{p}%")).unwrap_or_default();
        writeln!(f, "{:<34}{:>10}{:>7}{:>7}", "Structure", "Words", "%D", "%K")?;
        writeln!(f, "{:<34}{:>10}", "Whole Dictionary (D)", self.dictionary)?;
        let mut row = |name: &str, r: &CountRow| {
            writeln!(
                f,
                "{:<34}{:>10}{:>7}{:>7}",
                name,
                r.words,
                format!("{}%", r.pct_d),
                pct(r.pct_k)
            )
        };
        row("Kernel (K)", &self.kernel)?;
        row("Satellites (S) - small SCCs", &self.satellites)?;
        row("Core (C) - source SCCs", &self.core)?;
        if let Some(m) = &self.mgs {
            let name = if m.optimal {
                "MGS - Minimal Grounding Set"
            } else {
                "Grounding set (not proven minimal)"
            };
            row(name, &m.row)?;
        }
        let yes = |b: bool| if b { "yes" } else { "no" };
        writeln!(f, "Core is a single SCC: {}", yes(self.core_is_single_scc))?;
        write!(f, "Kernel is a grounding set: {}", yes(self.kernel_is_grounding_set))
    }
}
