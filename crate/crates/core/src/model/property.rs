//! Properties: human-readable facts extracted from an analysis.
//!
//! Each property has three identities:
//!
//! * the canonical key, unique within a sentence (`c:NP:2-8`,
//!   `t:3:to:+:5:flight:boston`, ...);
//! * the structural key, which drops word forms so the same configuration can
//!   be recognised in another sentence with the same part-of-speech sequence;
//! * the generic key, which drops token positions so that judgments on the
//!   same content can be pooled across a corpus.

use std::fmt;
use std::str::FromStr;

use super::{ModelError, SentenceType, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropertyKind {
    Constituent,
    SemanticTriple,
    WordSense,
    SentenceType,
    RuleName,
    ArgTriple,
}

/// Ranks above this are only shown in expert mode.
pub const MAX_DISPLAYED_FRIENDLINESS: u8 = 4;

impl PropertyKind {
    pub const ALL: [PropertyKind; 6] = [
        PropertyKind::Constituent,
        PropertyKind::SemanticTriple,
        PropertyKind::WordSense,
        PropertyKind::SentenceType,
        PropertyKind::RuleName,
        PropertyKind::ArgTriple,
    ];

    /// 1 is the easiest for a non-expert to judge.
    pub fn friendliness(self) -> u8 {
        match self {
            PropertyKind::Constituent => 1,
            PropertyKind::SemanticTriple => 2,
            PropertyKind::WordSense => 3,
            PropertyKind::SentenceType => 4,
            PropertyKind::RuleName => 5,
            PropertyKind::ArgTriple => 6,
        }
    }

    pub fn is_displayed(self) -> bool {
        self.friendliness() <= MAX_DISPLAYED_FRIENDLINESS
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PropertyKind::Constituent => "constituent",
            PropertyKind::SemanticTriple => "semantic-triple",
            PropertyKind::WordSense => "word-sense",
            PropertyKind::SentenceType => "sentence-type",
            PropertyKind::RuleName => "rule-name",
            PropertyKind::ArgTriple => "arg-triple",
        }
    }

    pub fn key_prefix(self) -> char {
        match self {
            PropertyKind::Constituent => 'c',
            PropertyKind::SemanticTriple => 't',
            PropertyKind::WordSense => 'w',
            PropertyKind::SentenceType => 'y',
            PropertyKind::RuleName => 'r',
            PropertyKind::ArgTriple => 'a',
        }
    }

    /// Kind of a canonical key, read from its prefix.
    pub fn of_key(key: &str) -> Result<PropertyKind, ModelError> {
        let prefix = key.split(':').next().unwrap_or_default();
        PropertyKind::ALL
            .into_iter()
            .find(|k| prefix.len() == 1 && prefix.starts_with(k.key_prefix()))
            .ok_or_else(|| ModelError::UnknownKind(prefix.to_string()))
    }
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PropertyKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PropertyKind::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| ModelError::UnknownKind(s.to_string()))
    }
}

/// One end of a triple.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TripleEnd {
    pub index: usize,
    /// Root word form (or semantic class once abstracted).
    pub word: String,
    /// Sense symbol used for class lookup; the lemma for unambiguous words.
    pub sense: String,
}

impl TripleEnd {
    pub fn new(index: usize, word: impl Into<String>, sense: impl Into<String>) -> Self {
        TripleEnd { index, word: word.into(), sense: sense.into() }
    }
}

/// A head–relation–dependent fact.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub head: TripleEnd,
    /// A preposition, a conjunction, or an argument-position label.
    pub relation: String,
    /// False when the dependent does not attach to the nearest eligible head.
    pub low: bool,
    pub dependent: TripleEnd,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PropertyContent {
    Constituent { category: String, span: Span, phrase: String },
    SemanticTriple(Triple),
    WordSense { index: usize, word: String, sense: String, gloss: String },
    SentenceType(SentenceType),
    RuleName(String),
    ArgTriple(Triple),
}

impl PropertyContent {
    pub fn kind(&self) -> PropertyKind {
        match self {
            PropertyContent::Constituent { .. } => PropertyKind::Constituent,
            PropertyContent::SemanticTriple(_) => PropertyKind::SemanticTriple,
            PropertyContent::WordSense { .. } => PropertyKind::WordSense,
            PropertyContent::SentenceType(_) => PropertyKind::SentenceType,
            PropertyContent::RuleName(_) => PropertyKind::RuleName,
            PropertyContent::ArgTriple(_) => PropertyKind::ArgTriple,
        }
    }

    pub fn span(&self) -> Option<Span> {
        match self {
            PropertyContent::Constituent { span, .. } => Some(*span),
            _ => None,
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::IncompleteProperty(msg));
        match self {
            PropertyContent::Constituent { category, .. } if category.is_empty() => {
                bad("constituent without a category".into())
            }
            PropertyContent::SemanticTriple(t) | PropertyContent::ArgTriple(t) => {
                if t.relation.is_empty() {
                    bad("triple without a relation".into())
                } else if t.head.index == t.dependent.index {
                    bad(format!("triple head and dependent are both token {}", t.head.index))
                } else if t.head.word.is_empty() || t.dependent.word.is_empty() {
                    bad("triple with an empty word".into())
                } else {
                    Ok(())
                }
            }
            PropertyContent::WordSense { sense, word, .. } if sense.is_empty() || word.is_empty() => {
                bad("word sense without a sense or word".into())
            }
            PropertyContent::RuleName(r) if r.is_empty() => bad("empty rule name".into()),
            _ => Ok(()),
        }
    }
}

fn key_word(word: &str) -> String {
    word.to_lowercase().chars().map(|c| if c.is_whitespace() || c == ':' { '_' } else { c }).collect()
}

fn low_mark(low: bool) -> char {
    if low {
        '+'
    } else {
        '-'
    }
}

/// Canonical identity string for a property's content.
///
/// The key embeds the kind and the token-relative structure, never the id of
/// the analysis the property was extracted from.
pub fn canonical_key(content: &PropertyContent) -> String {
    let p = content.kind().key_prefix();
    match content {
        PropertyContent::Constituent { category, span, .. } => format!("{p}:{category}:{span}"),
        PropertyContent::SemanticTriple(t) => format!(
            "{p}:{}:{}:{}:{}:{}:{}",
            t.head.index,
            key_word(&t.relation),
            low_mark(t.low),
            t.dependent.index,
            key_word(&t.head.word),
            key_word(&t.dependent.word)
        ),
        PropertyContent::ArgTriple(t) => format!(
            "{p}:{}:{}:{}:{}:{}",
            t.head.index,
            key_word(&t.relation),
            t.dependent.index,
            key_word(&t.head.word),
            key_word(&t.dependent.word)
        ),
        PropertyContent::WordSense { index, sense, .. } => format!("{p}:{index}:{}", key_word(sense)),
        PropertyContent::SentenceType(t) => format!("{p}:{}", t.as_str()),
        PropertyContent::RuleName(r) => format!("{p}:{r}"),
    }
}

fn display(content: &PropertyContent) -> String {
    match content {
        PropertyContent::Constituent { phrase, .. } => phrase.clone(),
        PropertyContent::SemanticTriple(t) => {
            let mark = if t.low { "" } else { "-" };
            format!("{} {mark}{} {}", t.head.word, t.relation, t.dependent.word)
        }
        PropertyContent::ArgTriple(t) => {
            format!("{} <{}> {}", t.head.word, t.relation, t.dependent.word)
        }
        PropertyContent::WordSense { word, gloss, .. } => format!("{word} = {gloss}"),
        PropertyContent::SentenceType(t) => t.display().to_string(),
        PropertyContent::RuleName(r) => r.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Property {
    pub content: PropertyContent,
    pub key: String,
    pub display: String,
}

impl Property {
    pub fn new(content: PropertyContent) -> Result<Property, ModelError> {
        content.validate()?;
        Ok(Property { key: canonical_key(&content), display: display(&content), content })
    }

    pub fn constituent(
        category: impl Into<String>,
        span: Span,
        phrase: impl Into<String>,
    ) -> Result<Property, ModelError> {
        Property::new(PropertyContent::Constituent { category: category.into(), span, phrase: phrase.into() })
    }

    pub fn kind(&self) -> PropertyKind {
        self.content.kind()
    }

    pub fn friendliness(&self) -> u8 {
        self.kind().friendliness()
    }

    pub fn span(&self) -> Option<Span> {
        self.content.span()
    }

    /// Key with word forms removed (constituents, senses, types and rules are
    /// already word-free).
    pub fn structural_key(&self) -> String {
        let p = self.kind().key_prefix();
        match &self.content {
            PropertyContent::SemanticTriple(t) => {
                format!("{p}:{}:{}:{}:{}", t.head.index, key_word(&t.relation), low_mark(t.low), t.dependent.index)
            }
            PropertyContent::ArgTriple(t) => {
                format!("{p}:{}:{}:{}", t.head.index, key_word(&t.relation), t.dependent.index)
            }
            _ => self.key.clone(),
        }
    }

    /// Position-free key for pooling judgments across sentences.
    pub fn generic_key(&self) -> String {
        let p = self.kind().key_prefix();
        match &self.content {
            PropertyContent::Constituent { category, phrase, .. } => {
                format!("{p}:{category}:{}", key_word(phrase))
            }
            PropertyContent::SemanticTriple(t) => {
                let mark = if t.low { "" } else { "-" };
                format!(
                    "{p}:{}:{mark}{}:{}",
                    key_word(&t.head.word),
                    key_word(&t.relation),
                    key_word(&t.dependent.word)
                )
            }
            PropertyContent::ArgTriple(t) => {
                format!("{p}:{}:{}:{}", key_word(&t.head.word), key_word(&t.relation), key_word(&t.dependent.word))
            }
            PropertyContent::WordSense { sense, .. } => format!("{p}:{}", key_word(sense)),
            PropertyContent::SentenceType(_) | PropertyContent::RuleName(_) => self.key.clone(),
        }
    }
}
