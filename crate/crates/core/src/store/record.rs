use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::engine::{Assertion, Session, SessionState};
use crate::extract::{build_incidence, HeadTable};
use crate::model::{Analysis, Incidence, Judgment, Provenance, Sentence, Value};

use super::{StoreConfig, StoreError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordStatus {
    Undecided,
    Ok,
    NotOk,
}

impl RecordStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RecordStatus::Undecided => "undecided",
            RecordStatus::Ok => "ok",
            RecordStatus::NotOk => "not-ok",
        }
    }
}

impl fmt::Display for RecordStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RecordStatus {
    type Err = StoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "undecided" => Ok(RecordStatus::Undecided),
            "ok" => Ok(RecordStatus::Ok),
            "not-ok" => Ok(RecordStatus::NotOk),
            _ => Err(StoreError::Invalid(format!("unknown status {s:?}"))),
        }
    }
}

/// One entry of the append-only judgment log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LogEntry {
    Judgment(Judgment),
    /// Undoes every judgment before it.
    Reset {
        sequence: u64,
    },
}

impl LogEntry {
    pub fn sequence(&self) -> u64 {
        match self {
            LogEntry::Judgment(j) => j.sequence,
            LogEntry::Reset { sequence } => *sequence,
        }
    }
}

/// A sentence with its analyses, judgment log and triage status.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceRecord {
    sentence: Sentence,
    analyses: Vec<Analysis>,
    incidence: Arc<Incidence>,
    log: Vec<LogEntry>,
    status: RecordStatus,
    failure_type: Option<String>,
    comment: Option<String>,
}

impl SentenceRecord {
    pub fn new(sentence: Sentence, analyses: Vec<Analysis>) -> Result<SentenceRecord, StoreError> {
        let incidence = Arc::new(build_incidence(&analyses, &sentence, &HeadTable::new())?);
        Ok(SentenceRecord {
            sentence,
            analyses,
            incidence,
            log: Vec::new(),
            status: RecordStatus::Undecided,
            failure_type: None,
            comment: None,
        })
    }

    /// Reassembles a persisted record and checks its invariants.
    pub fn from_parts(
        sentence: Sentence,
        analyses: Vec<Analysis>,
        log: Vec<LogEntry>,
        status: RecordStatus,
        failure_type: Option<String>,
        comment: Option<String>,
    ) -> Result<SentenceRecord, StoreError> {
        let mut record = SentenceRecord::new(sentence, analyses)?;
        record.log = log;
        record.status = status;
        record.failure_type = failure_type;
        record.comment = comment;
        record.validate()?;
        Ok(record)
    }

    pub fn validate(&self) -> Result<(), StoreError> {
        let id = self.id();
        let mut last = 0;
        for e in &self.log {
            if e.sequence() <= last {
                return Err(StoreError::Invalid(format!("{id}: log sequence {} is not increasing", e.sequence())));
            }
            last = e.sequence();
            if let LogEntry::Judgment(j) = e {
                if !self.incidence.contains(&j.target) {
                    return Err(StoreError::Invalid(format!("{id}: judgment on unknown key {:?}", j.target)));
                }
                if j.provenance == Provenance::Derived {
                    return Err(StoreError::Invalid(format!("{id}: derived values are never logged")));
                }
            }
        }
        match self.status {
            RecordStatus::Ok if self.session()?.state() != SessionState::Consistent => {
                Err(StoreError::Invalid(format!("{id}: marked ok but its judgments conflict")))
            }
            RecordStatus::NotOk if self.failure_type.is_none() => {
                Err(StoreError::Invalid(format!("{id}: marked not-ok without a failure type")))
            }
            _ => Ok(()),
        }
    }

    pub fn id(&self) -> &str {
        &self.sentence.id
    }

    pub fn sentence(&self) -> &Sentence {
        &self.sentence
    }

    pub fn analyses(&self) -> &[Analysis] {
        &self.analyses
    }

    pub fn incidence(&self) -> &Arc<Incidence> {
        &self.incidence
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn status(&self) -> RecordStatus {
        self.status
    }

    pub fn failure_type(&self) -> Option<&str> {
        self.failure_type.as_deref()
    }

    pub fn comment(&self) -> Option<&str> {
        self.comment.as_deref()
    }

    pub fn last_sequence(&self) -> u64 {
        self.log.last().map_or(0, LogEntry::sequence)
    }

    /// Judgments logged since the last reset, oldest first.
    pub fn effective_judgments(&self) -> impl Iterator<Item = &Judgment> {
        let start = self.log.iter().rposition(|e| matches!(e, LogEntry::Reset { .. })).map_or(0, |i| i + 1);
        self.log[start..].iter().filter_map(|e| match e {
            LogEntry::Judgment(j) => Some(j),
            LogEntry::Reset { .. } => None,
        })
    }

    /// Rebuilds the session from the log: latest judgment per key wins, user
    /// and propagated judgments outrank automatic ones.
    pub fn session(&self) -> Result<Session, StoreError> {
        session_from(&self.incidence, self.effective_judgments())
    }

    pub fn judge(&mut self, key: &str, value: Value, provenance: Provenance) -> Result<Session, StoreError> {
        let mut candidate = self.clone();
        candidate.log.push(LogEntry::Judgment(Judgment {
            target: key.to_string(),
            value,
            provenance,
            sequence: self.last_sequence() + 1,
        }));
        candidate.validate_judgment(key, provenance)?;
        let session = candidate.session()?;
        if session.state() == SessionState::Conflict && candidate.status == RecordStatus::Ok {
            candidate.status = RecordStatus::Undecided;
        }
        *self = candidate;
        Ok(session)
    }

    fn validate_judgment(&self, key: &str, provenance: Provenance) -> Result<(), StoreError> {
        if !self.incidence.contains(key) {
            return Err(StoreError::UnknownKey { id: self.id().to_string(), key: key.to_string() });
        }
        if provenance == Provenance::Derived {
            return Err(StoreError::Invalid("derived values are never logged".into()));
        }
        Ok(())
    }

    pub fn reset(&mut self) -> Result<Session, StoreError> {
        let sequence = self.last_sequence() + 1;
        self.log.push(LogEntry::Reset { sequence });
        if self.status == RecordStatus::Ok {
            self.status = RecordStatus::Undecided;
        }
        self.session()
    }

    pub fn mark_ok(&mut self) -> Result<(), StoreError> {
        if self.session()?.state() != SessionState::Consistent {
            return Err(StoreError::Invalid(format!("{}: cannot mark ok while judgments conflict", self.id())));
        }
        self.status = RecordStatus::Ok;
        self.failure_type = None;
        self.comment = None;
        Ok(())
    }

    pub fn mark_undecided(&mut self) {
        self.status = RecordStatus::Undecided;
        self.failure_type = None;
        self.comment = None;
    }

    /// Records a coverage failure. Re-marking replaces the earlier type and comment.
    pub fn mark_not_ok(
        &mut self,
        failure_type: &str,
        comment: Option<&str>,
        config: &StoreConfig,
    ) -> Result<(), StoreError> {
        if !config.failure_types.iter().any(|t| t == failure_type) {
            return Err(StoreError::UnknownFailureType(failure_type.to_string()));
        }
        self.status = RecordStatus::NotOk;
        self.failure_type = Some(failure_type.to_string());
        self.comment = comment.map(str::to_string);
        Ok(())
    }

    pub(crate) fn replace_log(&mut self, log: Vec<LogEntry>) {
        self.log = log;
    }

    pub(crate) fn set_failure_raw(&mut self, failure_type: Option<String>, comment: Option<String>) {
        self.failure_type = failure_type;
        self.comment = comment;
    }

    pub(crate) fn set_status_raw(&mut self, status: RecordStatus) {
        self.status = status;
    }
}

pub(crate) fn session_from<'a>(
    incidence: &Arc<Incidence>,
    judgments: impl IntoIterator<Item = &'a Judgment>,
) -> Result<Session, StoreError> {
    let mut user = BTreeMap::new();
    let mut auto = BTreeMap::new();
    for j in judgments {
        match j.provenance {
            Provenance::User | Provenance::PosPropagated => {
                user.insert(j.target.clone(), Assertion { value: j.value, provenance: j.provenance });
            }
            Provenance::Auto => {
                auto.insert(j.target.clone(), j.value);
            }
            Provenance::Derived => {}
        }
    }
    Ok(Session::with_assertions(incidence.clone(), user, auto)?)
}
