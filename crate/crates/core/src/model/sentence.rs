use std::fmt;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// A token of a sentence with its part-of-speech tag and root form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub index: usize,
    pub surface: String,
    pub pos: String,
    /// Root word form, used when displaying triples and senses.
    pub lemma: String,
}

impl Token {
    pub fn new(index: usize, surface: impl Into<String>, pos: impl Into<String>, lemma: impl Into<String>) -> Self {
        Token { index, surface: surface.into(), pos: pos.into(), lemma: lemma.into() }
    }

    /// Preposition tag.
    pub fn is_preposition(&self) -> bool {
        self.pos == "p"
    }

    pub fn is_conjunction(&self) -> bool {
        self.pos == "conj"
    }

    /// Function words never carry an argument relation of their own.
    pub fn is_function_word(&self) -> bool {
        matches!(self.pos.as_str(), "det" | "p" | "conj")
    }

    /// Nominal and verbal tokens are the heads a modifier may attach to.
    pub fn is_attachment_site(&self) -> bool {
        self.pos.starts_with('n') || self.pos.starts_with('v')
    }
}

/// A tokenized utterance: the unit of judging.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sentence {
    pub id: String,
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(id: impl Into<String>, tokens: Vec<Token>) -> Result<Self, ModelError> {
        let id = id.into();
        if id.is_empty() {
            return Err(ModelError::InvalidSentence("empty sentence id".into()));
        }
        if tokens.is_empty() {
            return Err(ModelError::InvalidSentence(format!("sentence {id} has no tokens")));
        }
        for (i, t) in tokens.iter().enumerate() {
            if t.index != i {
                return Err(ModelError::InvalidSentence(format!("sentence {id}: token {i} carries index {}", t.index)));
            }
            if t.surface.is_empty() {
                return Err(ModelError::InvalidSentence(format!("sentence {id}: token {i} has an empty surface")));
            }
        }
        Ok(Sentence { id, tokens })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn text(&self) -> String {
        self.surfaces(Span { start: 0, end: self.len() })
    }

    /// Space-joined surface forms over a span.
    pub fn surfaces(&self, span: Span) -> String {
        self.tokens[span.start..span.end].iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ")
    }

    pub fn pos_sequence(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.pos.as_str()).collect()
    }

    /// Surfaces only; used to decide whether two records describe the same utterance.
    pub fn same_words(&self, other: &Sentence) -> bool {
        self.tokens.len() == other.tokens.len()
            && self.tokens.iter().zip(&other.tokens).all(|(a, b)| a.surface == b.surface)
    }
}

/// Half-open token range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Result<Self, ModelError> {
        if start >= end {
            return Err(ModelError::InvalidSpan { start, end });
        }
        Ok(Span { start, end })
    }

    pub fn single(index: usize) -> Self {
        Span { start: index, end: index + 1 }
    }

    pub fn width(&self) -> usize {
        self.end - self.start
    }

    pub fn contains(&self, index: usize) -> bool {
        self.start <= index && index < self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}
