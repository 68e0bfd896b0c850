use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: duplicate headword {word:?} at sense {rank}")]
    Duplicate { line: usize, word: String, rank: u32 },

    #[error("definition of {entry:?} uses {token:?}, which is not a headword")]
    UnknownToken { entry: String, token: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("game rule {rule} violated: {detail}")]
    Rule { rule: RuleKind, detail: String },

    #[error("session {0} not found")]
    SessionNotFound(String),

    #[error("session is not complete ({pending} word(s) still pending)")]
    NotComplete { pending: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Game rules a submission can break.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    EmptyStartWord,
    StopWordStart,
    MultiWordStart,
    NotPending,
    SessionComplete,
    MinContentWords,
    SelfReference,
}

impl RuleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleKind::EmptyStartWord => "empty_start_word",
            RuleKind::StopWordStart => "stop_word_start",
            RuleKind::MultiWordStart => "multi_word_start",
            RuleKind::NotPending => "not_pending",
            RuleKind::SessionComplete => "session_complete",
            RuleKind::MinContentWords => "min_content_words",
            RuleKind::SelfReference => "self_reference",
        }
    }
}

impl std::fmt::Display for RuleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
