//! Interactive disambiguation of parse forests by judging discriminant
//! properties.
//!
//! A sentence's candidate analyses are reduced to human-readable properties
//! ([`extract`]). Properties that hold for some analyses but not others are
//! discriminants; judging a few of them good or bad narrows the candidates and
//! forces the values of the rest ([`engine`]). The [`store`] keeps judged
//! corpora on disk and carries judgments across grammar changes and between
//! similar sentences. [`grammar`] is a small chart parser that produces
//! genuinely ambiguous input.

pub mod engine;
pub mod extract;
pub mod fixtures;
pub mod grammar;
pub mod model;
pub mod store;

pub use engine::{
    propagate, Assertion, AutoConfig, Closure, EngineError, PriorCounts, PriorTable, Session, SessionState, Status,
};
pub use extract::{abstract_property, build_incidence, extract_properties, ClassMap, ExtractError, HeadTable};
pub use grammar::{parse_all, Grammar, GrammarError, DEFAULT_MAX_ANALYSES};
pub use model::{
    canonical_key, is_discriminant, Analysis, AnalysisSet, Incidence, Judgment, ModelError, Node, Property,
    PropertyContent, PropertyKind, Provenance, SenseTag, Sentence, SentenceType, Span, Token, Triple, TripleEnd, Value,
};
pub use store::{
    Corpus, CorpusFile, LogEntry, MergeReport, PosReport, RecordStatus, SentenceRecord, StoreConfig, StoreError,
};

/// Any error raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Store(#[from] StoreError),
}
