use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Value {
    Good,
    Bad,
}

impl Value {
    pub fn as_str(self) -> &'static str {
        match self {
            Value::Good => "good",
            Value::Bad => "bad",
        }
    }

    pub fn flipped(self) -> Value {
        match self {
            Value::Good => Value::Bad,
            Value::Bad => Value::Good,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Value {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "good" => Ok(Value::Good),
            "bad" => Ok(Value::Bad),
            _ => Err(ModelError::UnknownValue(s.to_string())),
        }
    }
}

/// Where a judgment came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    User,
    Derived,
    Auto,
    PosPropagated,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::User => "user",
            Provenance::Derived => "derived",
            Provenance::Auto => "auto",
            Provenance::PosPropagated => "pos-propagated",
        }
    }

    /// User and propagated judgments are assertions made on the annotator's
    /// behalf; they outrank automatic ones.
    pub fn is_user_level(self) -> bool {
        matches!(self, Provenance::User | Provenance::PosPropagated)
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provenance {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "user" => Ok(Provenance::User),
            "derived" => Ok(Provenance::Derived),
            "auto" => Ok(Provenance::Auto),
            "pos-propagated" => Ok(Provenance::PosPropagated),
            _ => Err(ModelError::UnknownProvenance(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Judgment {
    pub target: String,
    pub value: Value,
    pub provenance: Provenance,
    pub sequence: u64,
}
