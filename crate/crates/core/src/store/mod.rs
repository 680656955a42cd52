//! Corpus persistence and the corpus-level operations built on it: Not-OK
//! triage, merging after coverage changes, POS-sequence propagation, priors,
//! suspect detection, training export and judgment scripts.

mod corpus;
mod format;
mod merge;
mod pos;
mod priors;
mod record;
mod script;

pub use corpus::{Corpus, CorpusStats, FILE_EXTENSION};
pub use format::{load_file, save_file, CorpusFile, FORMAT_NAME, FORMAT_VERSION};
pub use merge::{merge, MergeReport};
pub use pos::{pos_propagate, PosReport, PosUpdate};
pub use priors::{export_training, find_suspects, update_priors, Suspect, SuspectConfig};
pub use record::{LogEntry, RecordStatus, SentenceRecord};
pub use script::{export_script, parse_script, replay, ReplayReport, ScriptAction, ScriptLine};

use std::path::PathBuf;

use thiserror::Error;

use crate::engine::EngineError;
use crate::extract::ExtractError;
use crate::model::ModelError;

pub const DEFAULT_MAX_RECORDS: usize = 50;

pub const DEFAULT_FAILURE_TYPES: [&str; 5] =
    ["missing-lexicon", "missing-construction", "wrong-tree-only", "extraction-gap", "other"];

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: line {line}{}: {message}", record.map(|r| format!(" (record {r})")).unwrap_or_default())]
    Format { path: String, line: usize, record: Option<usize>, message: String },
    #[error("{path}: unsupported corpus format version {found} (expected {expected})")]
    Version { path: String, found: u32, expected: u32 },
    #[error("corpus file {file} holds {count} records; the limit is {limit}")]
    TooManyRecords { file: String, count: usize, limit: usize },
    #[error("corpus file {0} holds no records")]
    EmptyFile(String),
    #[error("unknown sentence {0:?}")]
    UnknownSentence(String),
    #[error("duplicate sentence id {0:?}")]
    DuplicateSentence(String),
    #[error("sentence {id}: unknown property key {key:?}")]
    UnknownKey { id: String, key: String },
    #[error("unknown failure type {0:?}")]
    UnknownFailureType(String),
    #[error("sentence {0}: tokens differ, merge refused")]
    TokenMismatch(String),
    #[error("{0}")]
    Invalid(String),
    #[error("script line {line}: {message}")]
    Script { line: usize, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl StoreError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> StoreError {
        StoreError::Io { path: path.into(), source }
    }
}

/// Corpus-wide settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoreConfig {
    pub max_records: usize,
    pub failure_types: Vec<String>,
}

impl Default for StoreConfig {
    fn default() -> Self {
        StoreConfig {
            max_records: DEFAULT_MAX_RECORDS,
            failure_types: DEFAULT_FAILURE_TYPES.iter().map(|s| s.to_string()).collect(),
        }
    }
}
