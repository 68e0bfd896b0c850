use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use lexikernel::decomposition::{decompose_full, decompose_graph, Decomposition};
use lexikernel::dot::{label_colors, to_dot};
use lexikernel::game::SessionStore;
use lexikernel::lexicon::ClosureReport;
use lexikernel::mgs::{BranchRule, SolveStats, Straddle};
use lexikernel::stats::{attach_norms, run_all, DEFAULT_ENTRY_P};
use lexikernel::synth::{planted_norms, suppressor_norms, synthetic_lexicon, SynthConfig};
use lexikernel::{
    build_graph, close_lexicon, enumerate_mgs, load_norms, parse_dictionary, solve_mgs, straddle_report,
    ClosureMode, DictFormat, Error, GroundingSet, Lexicon, Result, SolverConfig, StopList,
};

use crate::manifest::RunManifest;
use crate::server;

#[derive(Debug, Parser)]
#[command(name = "lexikernel", version, about = "Kernel, Core, Satellite and grounding-set analysis of dictionaries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse, normalize and close a dictionary, writing it back out.
    Ingest {
        #[command(flatten)]
        input: DictArgs,
        /// Output format (defaults to the input format).
        #[arg(long, value_enum)]
        to: Option<FormatArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the structure table and write per-word labels.
    Decompose {
        #[command(flatten)]
        input: DictArgs,
        /// Labels file (word<TAB>label).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Find a minimum grounding set (minimum feedback vertex set).
    Mgs {
        #[command(flatten)]
        input: DictArgs,
        /// Solver time limit in seconds.
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
        /// List up to N optimal sets.
        #[arg(long, value_name = "N")]
        enumerate: Option<usize>,
        #[arg(long, value_enum, default_value_t = BranchArg::MaxDegree)]
        branch_rule: BranchArg,
        /// JSON result file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Compare layers against psycholinguistic norms.
    Stats {
        #[command(flatten)]
        input: DictArgs,
        #[arg(long)]
        norms: PathBuf,
        /// Grounding set: a solver JSON result or one word per line.
        #[arg(long)]
        mgs: Option<PathBuf>,
        /// Entry threshold for stepwise regression.
        #[arg(long, default_value_t = DEFAULT_ENTRY_P)]
        entry_p: f64,
        /// JSON report file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Write the definition graph in Graphviz DOT format.
    ExportDot {
        #[command(flatten)]
        input: DictArgs,
        /// Labels file from `decompose --out`, used to color vertices.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the dictionary game over HTTP.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        /// Directory of session logs; sessions are kept in memory if omitted.
        #[arg(long)]
        sessions: Option<PathBuf>,
        /// Stop list file, or `builtin` for the bundled English list.
        #[arg(long, default_value = "builtin")]
        stoplist: String,
        /// Static files for the browser client.
        #[arg(long)]
        ui: Option<PathBuf>,
    },
    /// Generate a seeded synthetic closed dictionary.
    Generate {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        entries: usize,
        #[arg(long, default_value_t = 0.04)]
        core_fraction: f64,
        #[arg(long, default_value_t = 0.03)]
        satellite_fraction: f64,
        #[arg(long, default_value_t = 10)]
        definition_length: usize,
        #[arg(long, value_enum, default_value_t = FormatArg::Jsonl)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write norms with planted layer ordering.
        #[arg(long)]
        norms: Option<PathBuf>,
        /// Also write norms with a suppressor pattern.
        #[arg(long)]
        suppressor_norms: Option<PathBuf>,
        /// Also write the grounding set the planted norms are built around.
        #[arg(long)]
        mgs: Option<PathBuf>,
        /// Time limit for that grounding set, in seconds.
        #[arg(long, default_value_t = 10.0)]
        time_limit: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Jsonl,
    Tsv,
}

impl From<FormatArg> for DictFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Jsonl => DictFormat::Jsonl,
            FormatArg::Tsv => DictFormat::Tsv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    MaxDegree,
    Lexicographic,
}

#[derive(Debug, Args)]
pub struct DictArgs {
    /// Dictionary file.
    pub dict: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Stop list file, or `builtin` for the bundled English list.
    #[arg(long)]
    pub stoplist: Option<String>,
    /// Reject definitions that use undefined words instead of dropping them.
    #[arg(long)]
    pub strict: bool,
    /// Remove headwords from their own definitions.
    #[arg(long)]
    pub drop_self: bool,
}

impl DictArgs {
    fn format(&self) -> DictFormat {
        match self.format {
            Some(f) => f.into(),
            None if self.dict.extension().is_some_and(|e| e.eq_ignore_ascii_case("tsv")) => DictFormat::Tsv,
            None => DictFormat::Jsonl,
        }
    }

    fn options(&self) -> serde_json::Value {
        json!({
            "format": format!("{:?}", self.format()).to_lowercase(),
            "strict": self.strict,
            "drop_self": self.drop_self,
        })
    }

    fn manifest(&self, command: &str, extra: serde_json::Value) -> RunManifest {
        let mut options = self.options();
        if let (Some(o), serde_json::Value::Object(e)) = (options.as_object_mut(), extra) {
            o.extend(e);
        }
        let mut m = RunManifest::new(command, &[self.dict.as_path()], options);
        m.stoplist = self.stoplist.clone();
        m
    }

    /// Parses, strips stop words and closes the dictionary.
    fn load(&self) -> Result<Lexicon> {
        let file = File::open(&self.dict).map_err(|e| io_context(&self.dict, e))?;
        let mut lex = parse_dictionary(BufReader::new(file), self.format())?;
        if let Some(source) = &self.stoplist {
            lex = lex.strip_stop_words(&load_stoplist(source)?);
        }
        if self.drop_self {
            lex = lex.drop_self_references();
        }
        let mode = if self.strict {
            ClosureMode::ErrorUnknown
        } else {
            ClosureMode::DropUnknown
        };
        let (lex, report) = close_lexicon(lex, mode)?;
        warn_closure(&report);
        Ok(lex)
    }
}

fn io_context(path: &Path, e: io::Error) -> Error {
    Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn load_stoplist(source: &str) -> Result<StopList> {
    if source == "builtin" {
        return Ok(StopList::default_english());
    }
    let path = Path::new(source);
    let file = File::open(path).map_err(|e| io_context(path, e))?;
    StopList::parse(BufReader::new(file))
}

fn warn_closure(report: &ClosureReport) {
    if !report.dropped.is_empty() {
        let tokens = report.unknown_tokens();
        let shown: Vec<&str> = tokens.iter().take(10).copied().collect();
        let more = if tokens.len() > shown.len() { ", ..." } else { "" };
        eprintln!(
            "warning: dropped {} use(s) of {} undefined word(s) from definitions: {}{more}",
            report.dropped.len(),
            tokens.len(),
            shown.join(", ")
        );
    }
    if !report.emptied.is_empty() {
        eprintln!(
            "warning: {} definition(s) became empty after closure",
            report.emptied.len()
        );
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| io_context(p, e)),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn time_limit(secs: f64) -> Result<Duration> {
    if !secs.is_finite() || secs <= 0.0 {
        return Err(Error::Precondition(format!("time limit must be a positive number of seconds, got {secs}")));
    }
    Ok(Duration::from_secs_f64(secs))
}

fn write_lexicon(lex: &Lexicon, format: DictFormat, out: Option<&Path>) -> Result<()> {
    let mut buf = Vec::new();
    match format {
        DictFormat::Jsonl => lex.write_jsonl(&mut buf)?,
        DictFormat::Tsv => lex.write_tsv(&mut buf)?,
    }
    write_output(out, &String::from_utf8_lossy(&buf))
}

/// Reads a grounding set from a solver JSON result or a word list.
pub fn read_grounding_set(path: &Path) -> Result<GroundingSet> {
    let text = fs::read_to_string(path).map_err(|e| io_context(path, e))?;
    if text.trim_start().starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(&text)?;
        let record = v.get("record").unwrap_or(&v);
        let words = record
            .get("words")
            .and_then(|w| w.as_array())
            .ok_or_else(|| Error::Parse {
                line: 1,
                message: format!("{}: no \"words\" array", path.display()),
            })?;
        let mut words: Vec<String> = words
            .iter()
            .filter_map(|w| w.as_str().map(str::to_lowercase))
            .collect();
        words.sort();
        words.dedup();
        let optimal = record.get("optimal").and_then(|o| o.as_bool()).unwrap_or(false);
        return Ok(GroundingSet {
            lower_bound: if optimal { words.len() } else { 0 },
            words,
            optimal,
            stats: SolveStats::default(),
        });
    }
    let words: BTreeSet<String> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim().to_lowercase())
        .filter(|l| !l.is_empty())
        .collect();
    Ok(GroundingSet {
        words: words.into_iter().collect(),
        optimal: false,
        lower_bound: 0,
        stats: SolveStats::default(),
    })
}

#[derive(Serialize)]
struct MgsOutput<'a> {
    record: lexikernel::mgs::SolverRecord,
    straddle: Straddle,
    alternatives: Option<Vec<&'a [String]>>,
}

fn fmt_set(words: &[String]) -> String {
    format!("{{{}}}", words.join(", "))
}

pub fn run(cli: Cli) -> Result<()> {
    let started = Instant::now();
    match cli.command {
        Command::Ingest { input, to, out } => {
            let lex = input.load()?;
            let format = to.map(DictFormat::from).unwrap_or(input.format());
            write_lexicon(&lex, format, out.as_deref())?;
            eprintln!("{} entries", lex.len());
            if let Some(out) = &out {
                let mut m = input.manifest("ingest", json!({ "to": format!("{format:?}").to_lowercase() }));
                m.wall_time_secs = started.elapsed().as_secs_f64();
                m.write_beside(out)?;
            }
        }

        Command::Decompose { input, out, json } => {
            let lex = input.load()?;
            let (d, report) = decompose_full(&lex)?;
            if json {
                println!("{}", report.to_json());
            } else {
                println!("{report}");
            }
            if let Some(out) = &out {
                write_output(Some(out), &d.to_label_tsv())?;
                let mut m = input.manifest("decompose", json!({}));
                m.wall_time_secs = started.elapsed().as_secs_f64();
                m.write_beside(out)?;
            }
        }

        Command::Mgs {
            input,
            time_limit: secs,
            enumerate,
            branch_rule,
            out,
            json,
        } => {
            let cfg = SolverConfig {
                time_limit: Some(time_limit(secs)?),
                enumeration_cap: enumerate.unwrap_or(1).max(1),
                branch_rule: match branch_rule {
                    BranchArg::MaxDegree => BranchRule::MaxDegree,
                    BranchArg::Lexicographic => BranchRule::Lexicographic,
                },
            };
            if enumerate == Some(0) {
                return Err(Error::Precondition("--enumerate needs a positive count".to_string()));
            }
            let lex = input.load()?;
            let g = build_graph(&lex)?;
            let (d, _) = decompose_graph(&g)?;
            let set = solve_mgs(&g, &cfg)?;
            let straddle = straddle_report(&d, &set)?;
            let alternatives = match enumerate {
                Some(_) if set.optimal => Some(enumerate_mgs(&g, &set, &cfg)?),
                Some(_) => {
                    eprintln!("warning: optimum not proven within the time limit; enumeration skipped");
                    None
                }
                None => None,
            };
            let output = MgsOutput {
                record: set.record(),
                straddle,
                alternatives: alternatives
                    .as_ref()
                    .map(|a| a.iter().map(|s| s.words.as_slice()).collect()),
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&output)?);
            } else {
                print_mgs(&set, &straddle, alternatives.as_deref(), cfg.enumeration_cap);
            }
            if let Some(out) = &out {
                write_output(Some(out), &(serde_json::to_string_pretty(&output)? + "\n"))?;
                let mut m = input.manifest(
                    "mgs",
                    json!({ "time_limit": secs, "enumerate": enumerate, "branch_rule": format!("{branch_rule:?}") }),
                );
                m.wall_time_secs = started.elapsed().as_secs_f64();
                m.write_beside(out)?;
            }
        }

        Command::Stats {
            input,
            norms,
            mgs,
            entry_p,
            out,
            json,
        } => {
            if !(entry_p > 0.0 && entry_p <= 1.0) {
                return Err(Error::Precondition(format!("--entry-p must lie in (0, 1], got {entry_p}")));
            }
            let lex = input.load()?;
            let (d, _) = decompose_full(&lex)?;
            let file = File::open(&norms).map_err(|e| io_context(&norms, e))?;
            let load = load_norms(BufReader::new(file))?;
            for w in &load.warnings {
                eprintln!("warning: {w}");
            }
            let set = mgs.as_deref().map(read_grounding_set).transpose()?;
            let frame = attach_norms(&d, &load.table, set.as_ref());
            if frame.coverage == 0.0 {
                eprintln!("warning: the norms cover no dictionary word; no tables produced");
                return Ok(());
            }
            let report = run_all(&frame, entry_p)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{report}");
            }
            if let Some(out) = &out {
                write_output(Some(out), &(serde_json::to_string_pretty(&report)? + "\n"))?;
                let mut m = input.manifest("stats", json!({ "entry_p": entry_p }));
                m.norms = Some(norms.display().to_string());
                if let Some(p) = &mgs {
                    m.inputs.push(crate::manifest::InputFile::new(p));
                }
                m.wall_time_secs = started.elapsed().as_secs_f64();
                m.write_beside(out)?;
            }
        }

        Command::ExportDot { input, labels, out } => {
            let lex = input.load()?;
            let g = build_graph(&lex)?;
            let colors = match &labels {
                Some(p) => {
                    let text = fs::read_to_string(p).map_err(|e| io_context(p, e))?;
                    Some(label_colors(&Decomposition::labels_from_tsv(&text)?))
                }
                None => None,
            };
            write_output(out.as_deref(), &to_dot(&g, colors.as_ref()))?;
            if let Some(out) = &out {
                let mut m = input.manifest("export-dot", json!({}));
                if let Some(p) = &labels {
                    m.inputs.push(crate::manifest::InputFile::new(p));
                }
                m.wall_time_secs = started.elapsed().as_secs_f64();
                m.write_beside(out)?;
            }
        }

        Command::Serve {
            port,
            bind,
            sessions,
            stoplist,
            ui,
        } => {
            let stop = load_stoplist(&stoplist)?;
            let store = match &sessions {
                Some(dir) => SessionStore::open(dir, stop)?,
                None => SessionStore::in_memory(stop),
            };
            let store = Arc::new(store);
            let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind((bind.as_str(), port)).await?;
                eprintln!(
                    "serving on http://{} ({} session(s) restored)",
                    listener.local_addr()?,
                    store.len()
                );
                server::serve(listener, store, ui).await
            })?;
        }

        Command::Generate {
            seed,
            entries,
            core_fraction,
            satellite_fraction,
            definition_length,
            format,
            out,
            norms,
            suppressor_norms: suppressor,
            mgs,
            time_limit: secs,
        } => {
            let cfg = SynthConfig {
                entries,
                core_fraction,
                satellite_fraction,
                mean_definition_length: definition_length,
                seed,
            };
            let synth = synthetic_lexicon(&cfg)?;
            write_lexicon(&synth.lexicon, format.into(), out.as_deref())?;
            if norms.is_some() || suppressor.is_some() || mgs.is_some() {
                let g = build_graph(&synth.lexicon)?;
                let (d, _) = decompose_graph(&g)?;
                if norms.is_some() || mgs.is_some() {
                    let solver = SolverConfig {
                        time_limit: Some(time_limit(secs)?),
                        ..SolverConfig::default()
                    };
                    let set = solve_mgs(&g, &solver)?;
                    if let Some(p) = &mgs {
                        write_output(Some(p), &(serde_json::to_string_pretty(&set.record())? + "\n"))?;
                    }
                    if let Some(p) = &norms {
                        let words: BTreeSet<String> = set.words.iter().cloned().collect();
                        let table = planted_norms(&d, &words, 0.0, seed.wrapping_add(1));
                        table.write_csv(File::create(p).map_err(|e| io_context(p, e))?)?;
                    }
                }
                if let Some(p) = &suppressor {
                    let table = suppressor_norms(&d, seed.wrapping_add(2));
                    table.write_csv(File::create(p).map_err(|e| io_context(p, e))?)?;
                }
            }
            if let Some(out) = &out {
                let mut m = RunManifest::new(
                    "generate",
                    &[],
                    json!({
                        "seed": seed,
                        "entries": entries,
                        "core_fraction": core_fraction,
                        "satellite_fraction": satellite_fraction,
                        "definition_length": definition_length,
                    }),
                );
                m.wall_time_secs = started.elapsed().as_secs_f64();
                m.write_beside(out)?;
            }
        }
    }
    Ok(())
}

fn print_mgs(set: &GroundingSet, straddle: &Straddle, alternatives: Option<&[GroundingSet]>, cap: usize) {
    if set.optimal {
        println!("grounding set size: {} (optimal)", set.size());
    } else {
        println!(
            "grounding set size: {} (not proven optimal; lower bound {})",
            set.size(),
            set.lower_bound
        );
    }
    println!("lower bound: {}", set.lower_bound);
    println!(
        "search: {} node(s), {:.3} s{}",
        set.stats.nodes,
        set.stats.wall_time_secs,
        if set.stats.timed_out { ", time limit reached" } else { "" }
    );
    println!(
        "straddle: in_core={} in_satellite={} outside_kernel={}",
        straddle.in_core, straddle.in_satellite, straddle.outside_kernel
    );
    println!("words: {}", fmt_set(&set.words));
    if let Some(all) = alternatives {
        println!("optimal sets: {} (cap {cap})", all.len());
        for s in all {
            println!("  {}", fmt_set(&s.words));
        }
    }
}
