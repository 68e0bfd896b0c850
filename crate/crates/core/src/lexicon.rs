//! Dictionary ingestion: parsing word/definition sources, stop-word removal
//! and closure into a self-contained lexicon.
//!
//! A definition is kept as an unordered set of lowercase content words taken
//! from the first sense of each headword only.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One headword with the content words of its (first) definition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub headword: String,
    pub sense_rank: u32,
    pub definition: BTreeSet<String>,
}

/// Headwords mapped to their definitions. `closed` is set only by
/// [`close_lexicon`], after which every defining word is itself a headword.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, LexiconEntry>,
    closed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DictFormat {
    Jsonl,
    Tsv,
}

impl FromStr for DictFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(DictFormat::Jsonl),
            "tsv" => Ok(DictFormat::Tsv),
            other => Err(format!("unknown dictionary format {other:?} (expected jsonl or tsv)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureMode {
    /// Remove defining words that have no entry and report them.
    DropUnknown,
    /// Fail on the first defining word that has no entry.
    ErrorUnknown,
}

/// What [`close_lexicon`] had to change.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    /// `(entry, token)` pairs removed because `token` is not a headword.
    pub dropped: Vec<(String, String)>,
    /// Entries whose definition is empty after closure.
    pub emptied: Vec<String>,
}

impl ClosureReport {
    pub fn is_clean(&self) -> bool {
        self.dropped.is_empty() && self.emptied.is_empty()
    }

    /// Distinct unknown tokens, sorted.
    pub fn unknown_tokens(&self) -> BTreeSet<&str> {
        self.dropped.iter().map(|(_, t)| t.as_str()).collect()
    }
}

/// Function words stripped from definitions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopList {
    words: BTreeSet<String>,
}

const DEFAULT_ENGLISH: &str = include_str!("../data/stopwords_en.txt");

impl StopList {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        StopList {
            words: words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        }
    }

    /// One word per line; `#` starts a comment.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut words = BTreeSet::new();
        for line in reader.lines() {
            let line = line?;
            let content = line.split('#').next().unwrap_or("").trim();
            if !content.is_empty() {
                words.insert(content.to_lowercase());
            }
        }
        Ok(StopList { words })
    }

    pub fn default_english() -> Self {
        Self::parse(DEFAULT_ENGLISH.as_bytes()).expect("bundled stop list is valid UTF-8")
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}

/// Lowercases a raw token and trims surrounding punctuation.
pub fn normalize_token(raw: &str) -> String {
    raw.trim_matches(|c: char| !c.is_alphanumeric() && c != '-' && c != '\'')
        .trim_matches(|c: char| c == '-' || c == '\'')
        .to_lowercase()
}

fn split_tokens<I, S>(raw: I) -> Vec<String>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out = Vec::new();
    for chunk in raw {
        out.extend(
            chunk
                .as_ref()
                .split_whitespace()
                .map(normalize_token)
                .filter(|t| !t.is_empty()),
        );
    }
    out
}

/// Content-word bag of a definition: stop words removed, order and
/// multiplicity discarded.
pub fn normalize_definition<I, S>(tokens: I, stop: &StopList) -> BTreeSet<String>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    content_words(tokens, stop).into_iter().collect()
}

/// The same content words as [`normalize_definition`], in order of first
/// occurrence.
pub fn content_words<I, S>(tokens: I, stop: &StopList) -> Vec<String>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut seen = BTreeSet::new();
    split_tokens(tokens)
        .into_iter()
        .filter(|t| !stop.contains(t) && seen.insert(t.clone()))
        .collect()
}

fn normalize_headword(raw: &str, line: usize) -> Result<String> {
    let trimmed = raw.trim();
    if trimmed.split_whitespace().count() > 1 {
        return Err(Error::Parse {
            line,
            message: format!("multiword headword {trimmed:?} is not supported"),
        });
    }
    let word = normalize_token(trimmed);
    if word.is_empty() {
        return Err(Error::Parse {
            line,
            message: "empty headword".to_string(),
        });
    }
    Ok(word)
}

#[derive(Deserialize)]
struct JsonSense {
    rank: u32,
    #[serde(default)]
    tokens: Vec<String>,
}

#[derive(Deserialize)]
struct JsonRecord {
    word: String,
    senses: Vec<JsonSense>,
}

#[derive(Serialize)]
struct JsonSenseOut<'a> {
    rank: u32,
    tokens: Vec<&'a str>,
}

#[derive(Serialize)]
struct JsonRecordOut<'a> {
    word: &'a str,
    senses: [JsonSenseOut<'a>; 1],
}

/// Parses a dictionary source. Only the lowest-ranked sense of each headword
/// survives; the result is not closed.
pub fn parse_dictionary<R: BufRead>(reader: R, format: DictFormat) -> Result<Lexicon> {
    // (word, rank) -> line, for duplicate detection across records.
    let mut seen: BTreeMap<(String, u32), usize> = BTreeMap::new();
    let mut entries: BTreeMap<String, LexiconEntry> = BTreeMap::new();

    let mut add = |word: String, rank: u32, tokens: Vec<String>, line: usize| -> Result<()> {
        if rank == 0 {
            return Err(Error::Parse {
                line,
                message: "sense rank must be a positive integer".to_string(),
            });
        }
        if seen.insert((word.clone(), rank), line).is_some() {
            return Err(Error::Duplicate { line, word, rank });
        }
        let keep = entries.get(&word).is_none_or(|e| rank < e.sense_rank);
        if keep {
            entries.insert(
                word.clone(),
                LexiconEntry {
                    headword: word,
                    sense_rank: rank,
                    definition: tokens.into_iter().collect(),
                },
            );
        }
        Ok(())
    };

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        match format {
            DictFormat::Jsonl => {
                let rec: JsonRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
                    line: lineno,
                    message: e.to_string(),
                })?;
                let word = normalize_headword(&rec.word, lineno)?;
                for sense in rec.senses {
                    let tokens = split_tokens(&sense.tokens);
                    add(word.clone(), sense.rank, tokens, lineno)?;
                }
            }
            DictFormat::Tsv => {
                let mut fields = line.splitn(3, '\t');
                let head = fields.next().unwrap_or("");
                let rank = fields.next().ok_or_else(|| Error::Parse {
                    line: lineno,
                    message: "expected headword<TAB>rank<TAB>tokens".to_string(),
                })?;
                let rank: u32 = rank.trim().parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("invalid sense rank {rank:?}"),
                })?;
                let word = normalize_headword(head, lineno)?;
                let tokens = split_tokens(fields.next());
                add(word, rank, tokens, lineno)?;
            }
        }
    }

    Ok(Lexicon {
        entries,
        closed: false,
    })
}

/// Makes every defining word a headword, either by dropping unknown tokens or
/// by rejecting the lexicon. Closing an already closed lexicon is the identity.
pub fn close_lexicon(raw: Lexicon, mode: ClosureMode) -> Result<(Lexicon, ClosureReport)> {
    let mut report = ClosureReport::default();
    let heads: BTreeSet<String> = raw.entries.keys().cloned().collect();
    let mut entries = raw.entries;

    for entry in entries.values_mut() {
        let unknown: Vec<String> = entry
            .definition
            .iter()
            .filter(|t| !heads.contains(*t))
            .cloned()
            .collect();
        if let (ClosureMode::ErrorUnknown, Some(token)) = (mode, unknown.first()) {
            return Err(Error::UnknownToken {
                entry: entry.headword.clone(),
                token: token.clone(),
            });
        }
        for token in unknown {
            entry.definition.remove(&token);
            report.dropped.push((entry.headword.clone(), token));
        }
        if entry.definition.is_empty() {
            report.emptied.push(entry.headword.clone());
        }
    }

    Ok((
        Lexicon {
            entries,
            closed: true,
        },
        report,
    ))
}

impl Lexicon {
    /// Builds an unclosed lexicon from `(headword, definition words)` pairs.
    /// Words are lowercased; later duplicates replace earlier ones.
    pub fn from_definitions<I, W, D, S>(defs: I) -> Self
    where
        I: IntoIterator<Item = (W, D)>,
        W: AsRef<str>,
        D: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let entries = defs
            .into_iter()
            .map(|(w, d)| {
                let headword = normalize_token(w.as_ref());
                let definition = split_tokens(d).into_iter().collect();
                (
                    headword.clone(),
                    LexiconEntry {
                        headword,
                        sense_rank: 1,
                        definition,
                    },
                )
            })
            .collect();
        Lexicon {
            entries,
            closed: false,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&LexiconEntry> {
        self.entries.get(word)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn definition(&self, word: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(word).map(|e| &e.definition)
    }

    /// Entries in headword order.
    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values()
    }

    pub fn headwords(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Removes stop words from every definition. Removal cannot break closure.
    pub fn strip_stop_words(mut self, stop: &StopList) -> Self {
        for entry in self.entries.values_mut() {
            entry.definition.retain(|t| !stop.contains(t));
        }
        self
    }

    /// Removes each headword from its own definition.
    pub fn drop_self_references(mut self) -> Self {
        for entry in self.entries.values_mut() {
            let head = entry.headword.clone();
            entry.definition.remove(&head);
        }
        self
    }

    /// Writes the lexicon in the jsonl exchange format, one record per entry.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for entry in self.entries.values() {
            let rec = JsonRecordOut {
                word: &entry.headword,
                senses: [JsonSenseOut {
                    rank: entry.sense_rank,
                    tokens: entry.definition.iter().map(String::as_str).collect(),
                }],
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    /// Writes the tab-separated exchange format.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        for entry in self.entries.values() {
            let tokens: Vec<&str> = entry.definition.iter().map(String::as_str).collect();
            writeln!(out, "{}\t{}\t{}", entry.headword, entry.sense_rank, tokens.join(" "))?;
        }
        Ok(())
    }
}
