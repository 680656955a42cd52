use serde::Serialize;

use crate::engine::SessionState;
use crate::model::{Analysis, Judgment, Sentence};

use super::record::{LogEntry, RecordStatus, SentenceRecord};
use super::StoreError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MergeReport {
    pub id: String,
    /// Judgments carried over, as they were logged on the old record. The new
    /// log replays them in the same order, renumbered from 1.
    pub transferred: Vec<Judgment>,
    /// Judgments whose property no longer exists.
    pub vanished: Vec<Judgment>,
    pub old_candidates: usize,
    pub new_candidates: usize,
    pub old_status: RecordStatus,
    pub new_status: RecordStatus,
}

impl MergeReport {
    pub fn demoted(&self) -> bool {
        self.old_status == RecordStatus::Ok && self.new_status != RecordStatus::Ok
    }
}

/// Moves the effective judgments of `old` onto a new analysis set of the same
/// sentence.
///
/// An ok record stays ok unless the merged judgments conflict or leave more
/// candidates than before (counting a single survivor as the baseline).
pub fn merge(
    old: &SentenceRecord,
    new_sentence: &Sentence,
    new_analyses: Vec<Analysis>,
) -> Result<(SentenceRecord, MergeReport), StoreError> {
    if old.sentence().tokens != new_sentence.tokens {
        return Err(StoreError::TokenMismatch(old.id().to_string()));
    }
    let mut merged = SentenceRecord::new(old.sentence().clone(), new_analyses)?;
    let old_session = old.session()?;
    let incidence = merged.incidence().clone();
    let (transferred, vanished): (Vec<Judgment>, Vec<Judgment>) =
        old.effective_judgments().cloned().partition(|j| incidence.contains(&j.target));
    merged.replace_log(
        transferred
            .iter()
            .zip(1..)
            .map(|(j, sequence)| LogEntry::Judgment(Judgment { sequence, ..j.clone() }))
            .collect(),
    );
    let session = merged.session()?;
    let old_candidates = old_session.candidates().len();
    let new_candidates = session.candidates().len();
    let new_status = match old.status() {
        RecordStatus::Ok if session.state() == SessionState::Conflict || new_candidates > old_candidates.max(1) => {
            RecordStatus::Undecided
        }
        s => s,
    };
    merged.set_status_raw(new_status);
    if new_status == RecordStatus::NotOk {
        let ft = old.failure_type().expect("not-ok records carry a failure type").to_string();
        merged.set_failure_raw(Some(ft), old.comment().map(str::to_string));
    }
    merged.validate()?;
    let report = MergeReport {
        id: old.id().to_string(),
        transferred,
        vanished,
        old_candidates,
        new_candidates,
        old_status: old.status(),
        new_status,
    };
    Ok((merged, report))
}
