use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ModelError, Node, Sentence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SentenceType {
    Imperative,
    WhQuestion,
    YnQuestion,
    Declarative,
    EllipticalNp,
    EllipticalPp,
    Other,
}

impl SentenceType {
    pub const ALL: [SentenceType; 7] = [
        SentenceType::Imperative,
        SentenceType::WhQuestion,
        SentenceType::YnQuestion,
        SentenceType::Declarative,
        SentenceType::EllipticalNp,
        SentenceType::EllipticalPp,
        SentenceType::Other,
    ];

    /// Stable identifier used in keys and files.
    pub fn as_str(self) -> &'static str {
        match self {
            SentenceType::Imperative => "imperative",
            SentenceType::WhQuestion => "wh-question",
            SentenceType::YnQuestion => "yn-question",
            SentenceType::Declarative => "declarative",
            SentenceType::EllipticalNp => "elliptical-np",
            SentenceType::EllipticalPp => "elliptical-pp",
            SentenceType::Other => "other",
        }
    }

    /// What the annotator sees.
    pub fn display(self) -> &'static str {
        match self {
            SentenceType::Imperative => "imperative",
            SentenceType::WhQuestion => "wh-question",
            SentenceType::YnQuestion => "yes/no question",
            SentenceType::Declarative => "declarative",
            SentenceType::EllipticalNp => "elliptical NP",
            SentenceType::EllipticalPp => "elliptical PP",
            SentenceType::Other => "other",
        }
    }
}

impl fmt::Display for SentenceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SentenceType {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        SentenceType::ALL
            .into_iter()
            .find(|t| t.as_str() == lower)
            .ok_or_else(|| ModelError::UnknownSentenceType(s.to_string()))
    }
}

impl Serialize for SentenceType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for SentenceType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The sense chosen for a sense-ambiguous token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SenseTag {
    /// Sense symbol, e.g. `serve.provide`.
    pub label: String,
    /// Short paraphrase shown to the annotator, e.g. `provide`.
    pub gloss: String,
}

/// One candidate analysis of a sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Analysis {
    pub tree: Node,
    /// Only sense-ambiguous tokens appear here.
    pub senses: BTreeMap<usize, SenseTag>,
    pub sentence_type: SentenceType,
}

impl Analysis {
    pub fn new(tree: Node, senses: BTreeMap<usize, SenseTag>, sentence_type: SentenceType) -> Self {
        Analysis { tree, senses, sentence_type }
    }

    pub fn validate(&self, sentence: &Sentence) -> Result<(), ModelError> {
        self.tree.validate(sentence.len())?;
        if let Some((&i, _)) = self.senses.iter().find(|(&i, _)| i >= sentence.len()) {
            return Err(ModelError::InvalidTree(format!(
                "sense assigned to token {i} beyond sentence length {}",
                sentence.len()
            )));
        }
        Ok(())
    }

    /// Lemma for a token, or its sense label when it is sense-ambiguous.
    pub fn sense_of<'a>(&'a self, sentence: &'a Sentence, index: usize) -> &'a str {
        self.senses.get(&index).map(|s| s.label.as_str()).unwrap_or(sentence.tokens[index].lemma.as_str())
    }
}
