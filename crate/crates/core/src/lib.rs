//! Structural analysis of dictionaries as definition graphs.
//!
//! A closed lexicon (every defining word is itself defined) becomes a
//! directed graph with an arc from each defining word to the word it
//! defines. From that graph this crate extracts the Kernel, splits it into
//! Core and Satellites, computes minimum grounding sets (minimum feedback
//! vertex sets), relates those layers to psycholinguistic norms, and runs the
//! dictionary game that produces small player-built lexicons.

pub mod decomposition;
pub mod dot;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod graph;
pub mod lexicon;
pub mod mgs;
pub mod norms;
pub mod stats;
pub mod synth;

pub use decomposition::{
    decompose_full, decompose_graph, extract_kernel, is_def_closed, split_core_satellites,
    Decomposition, Label, StructureReport,
};
pub use error::{Error, Result};
pub use graph::{build_graph, compute_sccs, condense, vertices_reaching_cycle, DefGraph, VertexId};
pub use lexicon::{
    close_lexicon, normalize_definition, parse_dictionary, ClosureMode, DictFormat, Lexicon,
    LexiconEntry, StopList,
};
pub use mgs::{
    enumerate_mgs, greedy_grounding_set, is_grounding_set, reduce_instance, solve_mgs,
    straddle_report, GroundingSet, SolverConfig,
};
pub use norms::{load_norms, NormsTable, Variable};
pub use stats::{attach_norms, run_all, AnalysisFrame, Comparison, StatsReport};
pub use synth::{synthetic_lexicon, SynthConfig};
