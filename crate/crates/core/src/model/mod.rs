//! The neutral data model shared by every other module.

mod analysis;
mod incidence;
mod judgment;
mod property;
mod sentence;
mod tree;

pub use analysis::{Analysis, SenseTag, SentenceType};
pub use incidence::{is_discriminant, sort_for_display, AnalysisSet, Incidence};
pub use judgment::{Judgment, Provenance, Value};
pub use property::{
    canonical_key, Property, PropertyContent, PropertyKind, Triple, TripleEnd, MAX_DISPLAYED_FRIENDLINESS,
};
pub use sentence::{Sentence, Span, Token};
pub use tree::Node;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid sentence: {0}")]
    InvalidSentence(String),
    #[error("invalid span {start}-{end}")]
    InvalidSpan { start: usize, end: usize },
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("malformed bracketing: {0}")]
    Bracketing(String),
    #[error("unknown property kind {0:?}")]
    UnknownKind(String),
    #[error("incomplete property content: {0}")]
    IncompleteProperty(String),
    #[error("unknown property key {0:?}")]
    UnknownKey(String),
    #[error("duplicate property key {0:?}")]
    DuplicateKey(String),
    #[error("analysis {id} out of range for {count} analyses")]
    AnalysisOutOfRange { id: usize, count: usize },
    #[error("unknown sentence type {0:?}")]
    UnknownSentenceType(String),
    #[error("unknown judgment value {0:?}")]
    UnknownValue(String),
    #[error("unknown provenance {0:?}")]
    UnknownProvenance(String),
}
