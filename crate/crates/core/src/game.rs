//! The dictionary game: a player defines a start word, then every content
//! word they used, until nothing is left undefined.
//!
//! A session is rebuilt from its event log, so the log is the only state
//! that needs persisting. [`SessionStore`] keeps one append-only JSONL file
//! per session and serializes writes to each session.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};

use crate::decomposition::{decompose_full, Decomposition, Label, StructureReport};
use crate::error::{Error, Result, RuleKind};
use crate::graph::build_graph;
use crate::lexicon::{close_lexicon, content_words, normalize_token, ClosureMode, Lexicon, StopList};
use crate::mgs::{solve_mgs, GroundingSet, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GameRules {
    pub min_content_words: usize,
    pub ban_self_reference: bool,
}

impl Default for GameRules {
    fn default() -> Self {
        GameRules {
            min_content_words: 2,
            ban_self_reference: true,
        }
    }
}

impl GameRules {
    pub fn validate(&self) -> Result<()> {
        if self.min_content_words == 0 {
            return Err(Error::Precondition("min_content_words must be at least 1".to_string()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Active,
    Complete,
}

/// One line of a session log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum GameEvent {
    Started {
        id: String,
        start_word: String,
        rules: GameRules,
        /// The stop list in force, so replay does not depend on configuration.
        stop_words: Vec<String>,
    },
    Accepted {
        word: String,
        tokens: Vec<String>,
    },
}

fn violation(rule: RuleKind, detail: impl Into<String>) -> Error {
    Error::Rule {
        rule,
        detail: detail.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameSession {
    id: String,
    start_word: String,
    rules: GameRules,
    stop: StopList,
    defined: BTreeMap<String, BTreeSet<String>>,
    /// Words used but not yet defined, in order of first use.
    pending: Vec<String>,
    status: SessionStatus,
    log: Vec<GameEvent>,
}

/// Client-facing snapshot of a session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub start_word: String,
    pub status: SessionStatus,
    pub pending: Vec<String>,
    pub defined: Vec<String>,
    pub defined_count: usize,
    pub rules: GameRules,
}

impl GameSession {
    /// Opens a session whose only pending word is `start_word`, lowercased.
    pub fn start(id: &str, start_word: &str, rules: GameRules, stop: &StopList) -> Result<Self> {
        rules.validate()?;
        let trimmed = start_word.trim();
        if trimmed.split_whitespace().count() > 1 {
            return Err(violation(
                RuleKind::MultiWordStart,
                format!("start word {trimmed:?} must be a single word"),
            ));
        }
        let word = normalize_token(trimmed);
        if word.is_empty() {
            return Err(violation(RuleKind::EmptyStartWord, "start word is empty"));
        }
        if stop.contains(&word) {
            return Err(violation(
                RuleKind::StopWordStart,
                format!("{word:?} is a stop word and cannot be defined"),
            ));
        }
        Ok(GameSession {
            id: id.to_string(),
            start_word: word.clone(),
            rules,
            stop: stop.clone(),
            defined: BTreeMap::new(),
            pending: vec![word.clone()],
            status: SessionStatus::Active,
            log: vec![GameEvent::Started {
                id: id.to_string(),
                start_word: word,
                rules,
                stop_words: stop.iter().map(str::to_string).collect(),
            }],
        })
    }

    /// Defines one pending word. On a rule violation the session is left
    /// unchanged.
    pub fn submit<S: AsRef<str>>(&mut self, word: &str, tokens: &[S]) -> Result<()> {
        if self.status == SessionStatus::Complete {
            return Err(violation(RuleKind::SessionComplete, "every word is already defined"));
        }
        let word = normalize_token(word);
        if !self.pending.contains(&word) {
            return Err(violation(
                RuleKind::NotPending,
                format!("{word:?} is not awaiting a definition"),
            ));
        }
        let used = content_words(tokens, &self.stop);
        let self_ref = self.rules.ban_self_reference && used.contains(&word);
        let too_few = used.len() < self.rules.min_content_words;
        if self_ref {
            let also = if too_few {
                format!("; it also has {} content word(s)", used.len())
            } else {
                String::new()
            };
            return Err(violation(
                RuleKind::SelfReference,
                format!("{word:?} appears in its own definition{also}"),
            ));
        }
        if too_few {
            return Err(violation(
                RuleKind::MinContentWords,
                format!(
                    "definition has {} content word(s); at least {} required",
                    used.len(),
                    self.rules.min_content_words
                ),
            ));
        }

        self.pending.retain(|w| *w != word);
        for w in &used {
            if *w != word && !self.defined.contains_key(w) && !self.pending.contains(w) {
                self.pending.push(w.clone());
            }
        }
        self.defined.insert(word.clone(), used.into_iter().collect());
        if self.pending.is_empty() {
            self.status = SessionStatus::Complete;
        }
        self.log.push(GameEvent::Accepted {
            word,
            tokens: tokens.iter().map(|t| t.as_ref().to_string()).collect(),
        });
        Ok(())
    }

    /// Rebuilds a session from its log.
    pub fn replay(events: &[GameEvent]) -> Result<Self> {
        let Some(GameEvent::Started {
            id,
            start_word,
            rules,
            stop_words,
        }) = events.first()
        else {
            return Err(Error::Invariant("session log does not begin with a start event".to_string()));
        };
        let mut s = GameSession::start(id, start_word, *rules, &StopList::new(stop_words))?;
        for ev in &events[1..] {
            match ev {
                GameEvent::Accepted { word, tokens } => s.submit(word, tokens).map_err(|e| {
                    Error::Invariant(format!("logged submission for {word:?} no longer applies: {e}"))
                })?,
                GameEvent::Started { .. } => {
                    return Err(Error::Invariant("second start event in session log".to_string()))
                }
            }
        }
        Ok(s)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn start_word(&self) -> &str {
        &self.start_word
    }

    pub fn rules(&self) -> GameRules {
        self.rules
    }

    pub fn status(&self) -> SessionStatus {
        self.status
    }

    pub fn pending(&self) -> &[String] {
        &self.pending
    }

    pub fn defined(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.defined
    }

    pub fn events(&self) -> &[GameEvent] {
        &self.log
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            id: self.id.clone(),
            start_word: self.start_word.clone(),
            status: self.status,
            pending: self.pending.clone(),
            defined: self.defined.keys().cloned().collect(),
            defined_count: self.defined.len(),
            rules: self.rules,
        }
    }

    /// The finished mini-dictionary, one entry per defined word.
    pub fn export(&self) -> Result<Lexicon> {
        if self.status != SessionStatus::Complete {
            return Err(Error::NotComplete {
                pending: self.pending.len(),
            });
        }
        let raw = Lexicon::from_definitions(self.defined.iter().map(|(w, bag)| (w, bag.iter())));
        let (lex, _) = close_lexicon(raw, ClosureMode::ErrorUnknown)?;
        Ok(lex)
    }

    pub fn analyze(&self) -> Result<SessionAnalysis> {
        let lex = self.export()?;
        let g = build_graph(&lex)?;
        let (decomposition, report) = decompose_full(&lex)?;
        let mgs = solve_mgs(&g, &SolverConfig::default())?;
        let report = report.with_mgs(&mgs);
        Ok(SessionAnalysis {
            labels: decomposition.labels().clone(),
            report,
            mgs_words: mgs.words.clone(),
            mgs_optimal: mgs.optimal,
            decomposition,
            mgs,
        })
    }
}

/// Structural analysis of a finished session.
#[derive(Debug, Clone, Serialize)]
pub struct SessionAnalysis {
    pub labels: BTreeMap<String, Label>,
    pub report: StructureReport,
    pub mgs_words: Vec<String>,
    pub mgs_optimal: bool,
    #[serde(skip)]
    pub decomposition: Decomposition,
    #[serde(skip)]
    pub mgs: GroundingSet,
}

pub fn new_session_id() -> String {
    uuid::Uuid::new_v4().simple().to_string()
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

/// Reads a session log file.
pub fn read_log(path: &Path) -> Result<Vec<GameEvent>> {
    let mut events = Vec::new();
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        events.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: format!("{}: {e}", path.display()),
        })?);
    }
    Ok(events)
}

struct Slot {
    session: GameSession,
    log: Option<File>,
}

impl Slot {
    fn append(&mut self, ev: &GameEvent) -> Result<()> {
        if let Some(f) = self.log.as_mut() {
            let mut line = serde_json::to_vec(ev)?;
            line.push(b'\n');
            f.write_all(&line)?;
            f.sync_data()?;
        }
        Ok(())
    }
}

/// Live sessions, optionally backed by a directory of session logs.
pub struct SessionStore {
    dir: Option<PathBuf>,
    stop: StopList,
    sessions: RwLock<HashMap<String, Arc<Mutex<Slot>>>>,
}

impl SessionStore {
    pub fn in_memory(stop: StopList) -> Self {
        SessionStore {
            dir: None,
            stop,
            sessions: RwLock::new(HashMap::new()),
        }
    }

    /// Opens (creating if needed) a log directory and replays every
    /// `*.jsonl` file in it.
    pub fn open(dir: impl Into<PathBuf>, stop: StopList) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let mut sessions = HashMap::new();
        let mut paths: Vec<PathBuf> = fs::read_dir(&dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        paths.sort();
        for path in paths {
            let session = GameSession::replay(&read_log(&path)?)?;
            let log = OpenOptions::new().append(true).open(&path)?;
            sessions.insert(
                session.id().to_string(),
                Arc::new(Mutex::new(Slot {
                    session,
                    log: Some(log),
                })),
            );
        }
        Ok(SessionStore {
            dir: Some(dir),
            stop,
            sessions: RwLock::new(sessions),
        })
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("session map lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn slot(&self, id: &str) -> Result<Arc<Mutex<Slot>>> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| Error::SessionNotFound(id.to_string()))
    }

    pub fn create(&self, start_word: &str, rules: GameRules) -> Result<SessionView> {
        let id = new_session_id();
        debug_assert!(valid_id(&id));
        let session = GameSession::start(&id, start_word, rules, &self.stop)?;
        let log = match &self.dir {
            Some(dir) => Some(
                OpenOptions::new()
                    .create_new(true)
                    .append(true)
                    .open(dir.join(format!("{id}.jsonl")))?,
            ),
            None => None,
        };
        let mut slot = Slot { session, log };
        let first = slot.session.events()[0].clone();
        slot.append(&first)?;
        let view = slot.session.view();
        self.sessions
            .write()
            .expect("session map lock")
            .insert(id, Arc::new(Mutex::new(slot)));
        Ok(view)
    }

    /// Runs `f` on a consistent snapshot of the session.
    pub fn with_session<T>(&self, id: &str, f: impl FnOnce(&GameSession) -> T) -> Result<T> {
        let slot = self.slot(id)?;
        let guard = slot.lock().expect("session lock");
        Ok(f(&guard.session))
    }

    pub fn view(&self, id: &str) -> Result<SessionView> {
        self.with_session(id, GameSession::view)
    }

    /// A clone of the session, for work that should not hold its lock.
    pub fn snapshot(&self, id: &str) -> Result<GameSession> {
        self.with_session(id, Clone::clone)
    }

    /// Applies one submission and appends it to the log before returning.
    pub fn submit<S: AsRef<str>>(&self, id: &str, word: &str, tokens: &[S]) -> Result<SessionView> {
        let slot = self.slot(id)?;
        let mut guard = slot.lock().expect("session lock");
        let mut next = guard.session.clone();
        next.submit(word, tokens)?;
        let ev = next.events().last().expect("accepted event").clone();
        guard.append(&ev)?;
        guard.session = next;
        Ok(guard.session.view())
    }

    pub fn export(&self, id: &str) -> Result<Lexicon> {
        self.with_session(id, GameSession::export)?
    }

    pub fn analyze(&self, id: &str) -> Result<SessionAnalysis> {
        self.snapshot(id)?.analyze()
    }

    /// Flushes every open log to disk.
    pub fn flush(&self) -> Result<()> {
        for slot in self.sessions.read().expect("session map lock").values() {
            let mut guard = slot.lock().expect("session lock");
            if let Some(f) = guard.log.as_mut() {
                f.flush()?;
                f.sync_all()?;
            }
        }
        Ok(())
    }
}
