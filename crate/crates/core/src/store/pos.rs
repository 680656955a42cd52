use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::engine::SessionState;
use crate::model::{Provenance, Value};

use super::corpus::Corpus;
use super::record::{RecordStatus, SentenceRecord};
use super::StoreError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PosUpdate {
    pub id: String,
    /// Target keys that received a propagated judgment.
    pub keys: Vec<String>,
    pub candidates: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PosReport {
    pub source: String,
    pub updated: Vec<PosUpdate>,
    /// Targets left untouched because the mapped judgments conflict there.
    pub conflicts: Vec<String>,
}

/// Copies the user judgments of an ok sentence to every other sentence with
/// the same part-of-speech sequence, matching properties by structure rather
/// than by words. A target either takes every applicable judgment or none.
///
/// Keys the target already holds a user-level judgment on are left alone, and
/// Not-OK targets are skipped.
pub fn pos_propagate(corpus: &mut Corpus, source_id: &str) -> Result<PosReport, StoreError> {
    let source = corpus.record(source_id)?.clone();
    if source.status() != RecordStatus::Ok {
        return Err(StoreError::Invalid(format!("{source_id}: only ok sentences propagate judgments")));
    }
    let pos = source.sentence().pos_sequence();
    let mut latest: BTreeMap<&str, Value> = BTreeMap::new();
    for j in source.effective_judgments().filter(|j| j.provenance == Provenance::User) {
        latest.insert(j.target.as_str(), j.value);
    }
    let mut by_structure: Vec<(String, Value)> = Vec::new();
    for (key, value) in latest {
        let p = source.incidence().property(key)?;
        by_structure.push((p.structural_key(), value));
    }

    let mut report = PosReport { source: source_id.to_string(), updated: Vec::new(), conflicts: Vec::new() };
    for target in corpus.records_mut() {
        if target.id() == source_id || target.status() == RecordStatus::NotOk || target.sentence().pos_sequence() != pos
        {
            continue;
        }
        match propagate_into(target, &by_structure)? {
            Some(update) if !update.keys.is_empty() => report.updated.push(update),
            Some(_) => {}
            None => report.conflicts.push(target.id().to_string()),
        }
    }
    Ok(report)
}

fn propagate_into(target: &mut SentenceRecord, judgments: &[(String, Value)]) -> Result<Option<PosUpdate>, StoreError> {
    let structure: HashMap<String, &str> =
        target.incidence().properties().iter().map(|p| (p.structural_key(), p.key.as_str())).collect();
    let session = target.session()?;
    let mut mapped = Vec::new();
    for (sk, value) in judgments {
        let Some(&key) = structure.get(sk) else { continue };
        if session.user_assertions().contains_key(key) {
            continue;
        }
        mapped.push((key.to_string(), *value));
    }
    let mut candidate = target.clone();
    for (key, value) in &mapped {
        candidate.judge(key, *value, Provenance::PosPropagated)?;
    }
    let session = candidate.session()?;
    if session.state() == SessionState::Conflict {
        return Ok(None);
    }
    *target = candidate;
    Ok(Some(PosUpdate {
        id: target.id().to_string(),
        keys: mapped.into_iter().map(|(k, _)| k).collect(),
        candidates: session.candidates().len(),
    }))
}
