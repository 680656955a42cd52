use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::Serialize;

use crate::engine::{PriorTable, SessionState};
use crate::extract::{abstract_property, ClassMap};
use crate::model::{Provenance, Value};

use super::record::{RecordStatus, SentenceRecord};
use super::StoreError;

/// Thresholds for flagging a judgment as unusual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuspectConfig {
    pub min_support: u64,
    pub min_agreement: f64,
}

impl Default for SuspectConfig {
    fn default() -> Self {
        SuspectConfig { min_support: 10, min_agreement: 0.9 }
    }
}

/// A sentence whose judgment goes against the corpus majority.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Suspect {
    pub id: String,
    pub key: String,
    pub generic_key: String,
    pub value: Value,
    pub agreement: f64,
    pub support: u64,
}

/// Every decided discriminant of an ok record with its value and provenance,
/// in key order. Consistency is required of ok records, so a conflicting one
/// contributes nothing.
fn decided(record: &SentenceRecord) -> Result<Vec<(&crate::model::Property, Value, Provenance)>, StoreError> {
    if record.status() != RecordStatus::Ok {
        return Ok(Vec::new());
    }
    let session = record.session()?;
    if session.state() == SessionState::Conflict {
        return Ok(Vec::new());
    }
    Ok(record.incidence().discriminants().filter_map(|p| session.value_of(&p.key).map(|(v, by)| (p, v, by))).collect())
}

/// Good/bad counts per abstracted discriminant over ok records. User, derived,
/// automatic and propagated values all count, each once per sentence.
pub fn update_priors<'a>(
    records: impl IntoIterator<Item = &'a SentenceRecord>,
    classes: &ClassMap,
) -> Result<PriorTable, StoreError> {
    let mut table = PriorTable::new();
    for r in records {
        for (p, v, _) in decided(r)? {
            table.record(abstract_property(p, classes).generic_key(), v);
        }
    }
    Ok(table)
}

/// Training lines `sentence-id TAB abstracted-key TAB good|bad TAB provenance`.
pub fn export_training<'a>(
    records: impl IntoIterator<Item = &'a SentenceRecord>,
    classes: &ClassMap,
) -> Result<String, StoreError> {
    let mut out = String::new();
    for r in records {
        for (p, v, by) in decided(r)? {
            let key = abstract_property(p, classes).generic_key();
            writeln!(out, "{}\t{key}\t{v}\t{by}", r.id()).expect("writing to a string");
        }
    }
    Ok(out)
}

/// Sentences holding a user judgment that contradicts a well-supported prior,
/// strongest contradiction first. Each sentence appears once, with its
/// strongest contradiction.
pub fn find_suspects<'a>(
    records: impl IntoIterator<Item = &'a SentenceRecord>,
    priors: &PriorTable,
    classes: &ClassMap,
    config: &SuspectConfig,
) -> Result<Vec<Suspect>, StoreError> {
    let mut out: Vec<Suspect> = Vec::new();
    if priors.is_empty() {
        return Ok(out);
    }
    for r in records {
        let session = r.session()?;
        let mut best: Option<Suspect> = None;
        for (key, a) in session.user_assertions() {
            let p = r.incidence().property(key)?;
            let generic = abstract_property(p, classes).generic_key();
            let Some(counts) = priors.get(&generic) else { continue };
            if counts.support() < config.min_support || counts.agreement() < config.min_agreement {
                continue;
            }
            if counts.majority().is_none_or(|m| m == a.value) {
                continue;
            }
            let s = Suspect {
                id: r.id().to_string(),
                key: key.clone(),
                generic_key: generic,
                value: a.value,
                agreement: counts.agreement(),
                support: counts.support(),
            };
            if best.as_ref().is_none_or(|b| rank(&s, b) == Ordering::Less) {
                best = Some(s);
            }
        }
        out.extend(best);
    }
    out.sort_by(rank);
    Ok(out)
}

fn rank(a: &Suspect, b: &Suspect) -> Ordering {
    b.agreement
        .total_cmp(&a.agreement)
        .then(b.support.cmp(&a.support))
        .then_with(|| a.id.cmp(&b.id))
        .then_with(|| a.key.cmp(&b.key))
}
