use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid word {text:?}: {reason}")]
    InvalidWord { text: String, reason: &'static str },

    #[error("invalid language code {0:?}")]
    InvalidLang(String),

    #[error("invalid boundaries {indices:?} for word of length {len}")]
    InvalidBoundaries { indices: Vec<usize>, len: usize },

    #[error("slice {start}..{end} out of range for text of length {len}")]
    SliceOutOfRange { start: usize, end: usize, len: usize },

    #[error("expected {expected} constituents, got {got}")]
    ConstituentCount { expected: usize, got: usize },

    #[error("word {word:?} has {len} characters, fewer than its {parts} constituents")]
    TooFewCharacters { word: String, len: usize, parts: usize },

    #[error("empty constituent for word {0:?}")]
    EmptyConstituent(String),

    #[error("no constituents given for word {0:?}")]
    NoConstituents(String),

    #[error("candidate cap of {cap} exceeded while aligning {word:?}")]
    CandidateCap { word: String, cap: u64 },

    #[error("tie-break requires equal total cost ({0} vs {1})")]
    UnequalCost(usize, usize),

    #[error("expansion depth {depth} exceeded for {word:?} (cyclic entry?)")]
    CyclicEntry { word: String, depth: usize },

    #[error("word {0:?} is not in the lexicon")]
    UnknownWord(String),

    #[error("vocab size {vocab_size} is below the alphabet size {alphabet}")]
    VocabTooSmall { vocab_size: usize, alphabet: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("compound pretokenization requires a segmenter")]
    MissingSegmenter,

    #[error("segmenter failed on {word:?}: {reason}")]
    Segmenter { word: String, reason: String },

    #[error("duplicate prediction for ({word}, {lang})")]
    DuplicatePrediction { word: String, lang: String },

    #[error("{path}:{line}: {message}")]
    Data { path: String, line: usize, message: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn data(path: impl std::fmt::Display, line: usize, message: impl Into<String>) -> Self {
        Error::Data { path: path.to_string(), line, message: message.into() }
    }

    /// Data errors are problems with input content rather than usage.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::InvalidConfig(_) | Error::MissingSegmenter)
    }
}
