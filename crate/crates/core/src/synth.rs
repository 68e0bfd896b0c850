//! Seeded generators for test and benchmark inputs: random digraphs, closed
//! lexicons with a planted Core and satellite cycles, and norms tables whose
//! layer means follow a planted ordering.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::decomposition::{Decomposition, Label};
use crate::error::{Error, Result};
use crate::graph::DefGraph;
use crate::lexicon::{close_lexicon, ClosureMode, Lexicon};
use crate::norms::{NormValues, NormsTable, Variable};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each ordered pair of distinct vertices becomes an arc with probability
/// `density`, and each vertex gets a self-loop with probability `loop_density`.
pub fn random_digraph<R: Rng>(n: usize, density: f64, loop_density: f64, rng: &mut R) -> DefGraph {
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            let p = if u == v { loop_density } else { density };
            if rng.random_bool(p) {
                arcs.push((u, v));
            }
        }
    }
    DefGraph::from_index_arcs(n, arcs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub entries: usize,
    /// Share of entries planted in the Core.
    pub core_fraction: f64,
    /// Share of entries planted in satellite cycles of 3 or 4 words.
    pub satellite_fraction: f64,
    pub mean_definition_length: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            entries: 2_000,
            core_fraction: 0.04,
            satellite_fraction: 0.03,
            mean_definition_length: 10,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticDictionary {
    pub lexicon: Lexicon,
    pub core: BTreeSet<String>,
    pub satellites: BTreeSet<String>,
}

const SYLLABLES: [&str; 20] = [
    "ba", "de", "fi", "go", "ku", "la", "me", "ni", "po", "ru", "sa", "te", "vi", "wo", "zu", "ka",
    "le", "mi", "no", "pu",
];

fn word_name(mut i: usize, digits: usize) -> String {
    let mut s = String::with_capacity(2 * digits);
    for _ in 0..digits {
        s.push_str(SYLLABLES[i % SYLLABLES.len()]);
        i /= SYLLABLES.len();
    }
    s
}

/// Draws up to `k` distinct members of `pool`.
fn pick<R: Rng>(rng: &mut R, pool: &[usize], k: usize, into: &mut BTreeSet<usize>) {
    let target = into.len() + k.min(pool.len());
    while into.len() < target {
        into.insert(pool[rng.random_range(0..pool.len())]);
    }
}

/// Builds a closed lexicon with known structure:
///
/// * Core words are defined only by Core words and chained into one cycle,
///   so they form a single source component of the Kernel.
/// * Satellite words come in cycles of 3 or 4; each is also defined by Core
///   words and sometimes by words of earlier satellite cycles.
/// * Every other word is defined by Kernel words and earlier non-Kernel words
///   and never used in a Kernel definition, so it reaches no cycle.
///
/// Definition lengths are uniform on `[len/2, 3len/2]` around the mean.
pub fn synthetic_lexicon(cfg: &SynthConfig) -> Result<SyntheticDictionary> {
    if cfg.entries < 10 {
        return Err(Error::Precondition("synthetic dictionaries need at least 10 entries".to_string()));
    }
    if cfg.mean_definition_length == 0 {
        return Err(Error::Precondition("mean definition length must be positive".to_string()));
    }
    let n = cfg.entries;
    let n_core = ((n as f64 * cfg.core_fraction).round() as usize).max(3);
    let mut n_sat = (n as f64 * cfg.satellite_fraction).round() as usize;
    if n_core + n_sat >= n {
        return Err(Error::Precondition("Core and satellites leave no room for other words".to_string()));
    }
    let mut rng = rng(cfg.seed);

    // Shuffled names so that alphabetical order says nothing about structure.
    let mut digits = 1;
    while SYLLABLES.len().pow(digits as u32) < n {
        digits += 1;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let names: Vec<String> = perm.iter().map(|&i| word_name(i, digits)).collect();

    let len = cfg.mean_definition_length;
    let lo = (len / 2).max(1);
    let hi = len + len / 2;
    let mut defs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];

    let core: Vec<usize> = (0..n_core).collect();
    for i in 0..n_core {
        let d = &mut defs[i];
        d.insert((i + n_core - 1) % n_core);
        let k = rng.random_range(lo..=hi).saturating_sub(1);
        let mut extra = BTreeSet::new();
        pick(&mut rng, &core, k, &mut extra);
        extra.remove(&i);
        d.extend(extra);
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut next = n_core;
    while n_sat >= 3 {
        let size = if n_sat == 3 || n_sat == 6 || (n_sat != 4 && rng.random_bool(0.5)) { 3 } else { 4 };
        let size = size.min(n_sat);
        groups.push((next..next + size).collect());
        next += size;
        n_sat -= size;
    }
    let sat_end = next;
    for (gi, group) in groups.iter().enumerate() {
        let earlier: Vec<usize> = groups[..gi].iter().flatten().copied().collect();
        for (j, &w) in group.iter().enumerate() {
            let mut d = BTreeSet::from([group[(j + group.len() - 1) % group.len()]]);
            let k = rng.random_range(lo..=hi).saturating_sub(1);
            let from_earlier = if earlier.is_empty() { 0 } else { k / 4 };
            pick(&mut rng, &core, (k - from_earlier).max(1), &mut d);
            pick(&mut rng, &earlier, from_earlier, &mut d);
            defs[w] = d;
        }
    }

    let kernel: Vec<usize> = (0..sat_end).collect();
    for w in sat_end..n {
        let k = rng.random_range(lo..=hi);
        let outside_before = w - sat_end;
        let from_outside = if outside_before == 0 { 0 } else { k / 2 };
        let mut d = BTreeSet::new();
        pick(&mut rng, &kernel, k - from_outside, &mut d);
        let target = d.len() + from_outside.min(outside_before);
        while d.len() < target {
            d.insert(rng.random_range(sat_end..w));
        }
        defs[w] = d;
    }

    let raw = Lexicon::from_definitions(
        defs.iter()
            .enumerate()
            .map(|(w, d)| (names[w].as_str(), d.iter().map(|&u| names[u].as_str()))),
    );
    let (lexicon, _) = close_lexicon(raw, ClosureMode::ErrorUnknown)?;
    Ok(SyntheticDictionary {
        lexicon,
        core: core.iter().map(|&i| names[i].clone()).collect(),
        satellites: (n_core..sat_end).map(|i| names[i].clone()).collect(),
    })
}

/// Centre and spread of each variable on a plausible scale.
const SCALES: [(f64, f64); 5] = [(450.0, 60.0), (450.0, 60.0), (450.0, 60.0), (60.0, 15.0), (60.0, 15.0)];

fn draw<R: Rng>(rng: &mut R, var: Variable, shift: f64) -> f64 {
    let (centre, spread) = SCALES[var.index()];
    let noise = Normal::new(0.0, 1.0).expect("unit normal").sample(rng);
    let sign = crate::stats::inward_sign(var);
    centre + spread * (sign * shift + noise)
}

/// Norms in which the layer means follow MGS > Core > Satellites >
/// rest of dictionary, in each variable's inward direction: members of
/// `grounding` are shifted by 4 spreads, other Core words by 2, Satellite
/// words by 1, with unit-spread noise. A `missing` share of cells is left
/// empty.
pub fn planted_norms(d: &Decomposition, grounding: &BTreeSet<String>, missing: f64, seed: u64) -> NormsTable {
    let mut rng = rng(seed);
    let mut table = NormsTable::new();
    for (w, &label) in d.labels() {
        let shift = if grounding.contains(w) {
            4.0
        } else {
            match label {
                Label::Core => 2.0,
                Label::Satellite => 1.0,
                Label::Outside => 0.0,
            }
        };
        let mut vals = NormValues::default();
        for v in Variable::ALL {
            let x = draw(&mut rng, v, shift);
            if !rng.random_bool(missing) {
                vals.0[v.index()] = Some(x);
            }
        }
        table.insert(w, vals);
    }
    table
}

/// Norms with a suppressor pattern for Kernel membership `y`:
/// `freq_written = 2y + e1` and `concreteness = 0.9 freq_written - 0.3y + e2`
/// with a small `e2`. Concreteness correlates positively with `y`, but once
/// written frequency is in the model its coefficient turns negative. The
/// remaining variables are pure noise.
pub fn suppressor_norms(d: &Decomposition, seed: u64) -> NormsTable {
    let mut rng = rng(seed);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let mut table = NormsTable::new();
    for (w, &label) in d.labels() {
        let y = if label.in_kernel() { 1.0 } else { 0.0 };
        let freq = 2.0 * y + unit.sample(&mut rng);
        let conc = 0.9 * freq - 0.3 * y + 0.2 * unit.sample(&mut rng);
        let mut vals = NormValues::default();
        vals.0[Variable::FreqWritten.index()] = Some(freq);
        vals.0[Variable::Concreteness.index()] = Some(conc);
        for v in [Variable::Aoa, Variable::Imageability, Variable::FreqOral] {
            vals.0[v.index()] = Some(unit.sample(&mut rng));
        }
        table.insert(w, vals);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::decompose_full;

    #[test]
    fn planted_structure_is_recovered() {
        let cfg = SynthConfig {
            entries: 600,
            ..SynthConfig::default()
        };
        let s = synthetic_lexicon(&cfg).unwrap();
        assert_eq!(s.lexicon.len(), 600);
        let (d, report) = decompose_full(&s.lexicon).unwrap();
        let core: BTreeSet<String> = d.core().into_iter().map(str::to_string).collect();
        let sats: BTreeSet<String> = d.satellites().into_iter().map(str::to_string).collect();
        assert_eq!(core, s.core);
        assert_eq!(sats, s.satellites);
        assert!(report.core_is_single_scc);
    }

    #[test]
    fn generator_is_deterministic() {
        let cfg = SynthConfig {
            entries: 200,
            seed: 9,
            ..SynthConfig::default()
        };
        let a = synthetic_lexicon(&cfg).unwrap().lexicon;
        let b = synthetic_lexicon(&cfg).unwrap().lexicon;
        assert_eq!(a.to_jsonl_string(), b.to_jsonl_string());
    }

    #[test]
    fn mean_definition_length() {
        let s = synthetic_lexicon(&SynthConfig::default()).unwrap();
        let total: usize = s.lexicon.entries().map(|e| e.definition.len()).sum();
        let mean = total as f64 / s.lexicon.len() as f64;
        assert!((mean - 10.0).abs() < 1.0, "mean {mean}");
    }

    #[test]
    fn random_digraph_extremes() {
        let mut r = rng(3);
        assert_eq!(random_digraph(5, 0.0, 0.0, &mut r).arc_count(), 0);
        assert_eq!(random_digraph(5, 1.0, 1.0, &mut r).arc_count(), 25);
    }
}
