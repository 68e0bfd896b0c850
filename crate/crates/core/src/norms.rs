//! Psycholinguistic norms: per-word age of acquisition, concreteness,
//! imageability and written/oral frequency, each possibly missing.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;

pub const NORMS_HEADER: [&str; 6] = [
    "word",
    "aoa",
    "concreteness",
    "imageability",
    "freq_written",
    "freq_oral",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    Aoa,
    Concreteness,
    Imageability,
    FreqWritten,
    FreqOral,
}

impl Variable {
    pub const ALL: [Variable; 5] = [
        Variable::Aoa,
        Variable::Concreteness,
        Variable::Imageability,
        Variable::FreqWritten,
        Variable::FreqOral,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        NORMS_HEADER[self.index() + 1]
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The five values for one word, in [`Variable::ALL`] order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NormValues(pub [Option<f64>; 5]);

impl NormValues {
    pub fn get(&self, var: Variable) -> Option<f64> {
        self.0[var.index()]
    }

    pub fn any(&self) -> bool {
        self.0.iter().any(Option::is_some)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormsTable {
    rows: BTreeMap<String, NormValues>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormsLoad {
    pub table: NormsTable,
    pub warnings: Vec<String>,
}

impl NormsTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, word: &str, values: NormValues) -> Option<NormValues> {
        self.rows.insert(word.to_lowercase(), values)
    }

    pub fn get(&self, word: &str) -> Option<&NormValues> {
        self.rows.get(word)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &NormValues)> {
        self.rows.iter().map(|(w, v)| (w.as_str(), v))
    }

    /// Fraction of headwords with at least one value.
    pub fn coverage(&self, lex: &Lexicon) -> f64 {
        if lex.is_empty() {
            return 0.0;
        }
        let covered = lex
            .headwords()
            .filter(|w| self.rows.get(*w).is_some_and(NormValues::any))
            .count();
        covered as f64 / lex.len() as f64
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(NORMS_HEADER)?;
        for (word, vals) in &self.rows {
            let mut rec = vec![word.clone()];
            rec.extend(vals.0.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads the norms CSV. Empty cells are missing values; a repeated word keeps
/// its last row and produces a warning.
pub fn load_norms<R: Read>(source: R) -> Result<NormsLoad> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header = reader.headers()?.clone();
    let got: Vec<String> = header.iter().map(|h| h.to_ascii_lowercase()).collect();
    if got != NORMS_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {}, found {}", NORMS_HEADER.join(","), got.join(",")),
        });
    }

    let mut load = NormsLoad::default();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 2;
        let rec = rec?;
        if rec.len() != NORMS_HEADER.len() {
            return Err(Error::Parse {
                line: row,
                message: format!("expected {} fields, found {}", NORMS_HEADER.len(), rec.len()),
            });
        }
        let word = rec[0].to_lowercase();
        if word.is_empty() {
            return Err(Error::Parse {
                line: row,
                message: "empty word".to_string(),
            });
        }
        let mut values = NormValues::default();
        for (k, cell) in rec.iter().skip(1).enumerate() {
            if cell.is_empty() {
                continue;
            }
            let x: f64 = cell.parse().map_err(|_| Error::Parse {
                line: row,
                message: format!("non-numeric {} value {cell:?}", NORMS_HEADER[k + 1]),
            })?;
            if !x.is_finite() {
                return Err(Error::Parse {
                    line: row,
                    message: format!("non-finite {} value {cell:?}", NORMS_HEADER[k + 1]),
                });
            }
            values.0[k] = Some(x);
        }
        if load.table.insert(&word, values).is_some() {
            load.warnings
                .push(format!("row {row}: duplicate word {word:?}; later row wins"));
        }
    }
    Ok(load)
}
