//! Judgment scripts: one tab-separated action per line.
//!
//! ```text
//! s0001  c:NP:2-9  good
//! s0001  w:6:serve.provide  good  user
//! s0002  !reset
//! s0003  !status  not-ok  missing-construction  gapping
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. The provenance column
//! defaults to `user`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::engine::SessionState;
use crate::model::{Provenance, Value};

use super::corpus::Corpus;
use super::record::{LogEntry, RecordStatus};
use super::StoreError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScriptAction {
    Judge { key: String, value: Value, provenance: Provenance },
    Reset,
    Status { status: RecordStatus, failure_type: Option<String>, comment: Option<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptLine {
    pub line: usize,
    pub sentence: String,
    pub action: ScriptAction,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ReplayReport {
    pub actions: usize,
    pub touched: Vec<String>,
    /// Sentences marked ok because the script narrowed them to one candidate
    /// without setting a status itself.
    pub auto_ok: Vec<String>,
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

pub fn parse_script(text: &str) -> Result<Vec<ScriptLine>, StoreError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| StoreError::Script { line, message };
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = raw.split('\t').collect();
        if cols.len() < 2 || cols[0].is_empty() {
            return Err(err("expected sentence id and action".into()));
        }
        let action = match cols[1] {
            "!reset" if cols.len() == 2 => ScriptAction::Reset,
            "!reset" => return Err(err("reset takes no arguments".into())),
            "!status" => {
                if !(3..=5).contains(&cols.len()) {
                    return Err(err("status takes a status, then optional failure type and comment".into()));
                }
                let status: RecordStatus = cols[2].parse().map_err(|e: StoreError| err(e.to_string()))?;
                let failure_type = cols.get(3).filter(|s| !s.is_empty()).map(|s| s.to_string());
                let comment = cols.get(4).map(|s| unescape(s));
                if status == RecordStatus::NotOk && failure_type.is_none() {
                    return Err(err("not-ok needs a failure type".into()));
                }
                if status != RecordStatus::NotOk && cols.len() > 3 {
                    return Err(err(format!("{status} takes no failure type")));
                }
                ScriptAction::Status { status, failure_type, comment }
            }
            key => {
                if !(3..=4).contains(&cols.len()) {
                    return Err(err("judgment lines have a key, a value and an optional provenance".into()));
                }
                let value: Value = cols[2].parse().map_err(|e: crate::model::ModelError| err(e.to_string()))?;
                let provenance = match cols.get(3) {
                    Some(p) => p.parse().map_err(|e: crate::model::ModelError| err(e.to_string()))?,
                    None => Provenance::User,
                };
                if provenance == Provenance::Derived {
                    return Err(err("derived values cannot be scripted".into()));
                }
                ScriptAction::Judge { key: key.to_string(), value, provenance }
            }
        };
        out.push(ScriptLine { line, sentence: cols[0].to_string(), action });
    }
    Ok(out)
}

/// Applies a script to the corpus in memory. Either every line applies or the
/// corpus is left unchanged.
///
/// A touched sentence that ends with exactly one consistent candidate and
/// whose status the script never set is marked ok.
pub fn replay(corpus: &mut Corpus, text: &str) -> Result<ReplayReport, StoreError> {
    let lines = parse_script(text)?;
    let mut work = corpus.clone();
    let mut touched = BTreeSet::new();
    let mut explicit = BTreeSet::new();
    let config = work.config().clone();
    for l in &lines {
        let wrap = |e: StoreError| StoreError::Script { line: l.line, message: e.to_string() };
        let record = work.record_mut(&l.sentence).map_err(wrap)?;
        match &l.action {
            ScriptAction::Judge { key, value, provenance } => {
                record.judge(key, *value, *provenance).map_err(wrap)?;
            }
            ScriptAction::Reset => {
                record.reset().map_err(wrap)?;
            }
            ScriptAction::Status { status, failure_type, comment } => {
                explicit.insert(l.sentence.clone());
                match status {
                    RecordStatus::Ok => record.mark_ok().map_err(wrap)?,
                    RecordStatus::Undecided => record.mark_undecided(),
                    RecordStatus::NotOk => record
                        .mark_not_ok(failure_type.as_deref().unwrap_or_default(), comment.as_deref(), &config)
                        .map_err(wrap)?,
                }
            }
        }
        touched.insert(l.sentence.clone());
    }
    let mut auto_ok = Vec::new();
    for id in touched.difference(&explicit) {
        let record = work.record_mut(id)?;
        let session = record.session()?;
        if record.status() == RecordStatus::Undecided
            && session.state() == SessionState::Consistent
            && session.candidates().len() == 1
        {
            record.mark_ok()?;
            auto_ok.push(id.clone());
        }
    }
    *corpus = work;
    Ok(ReplayReport { actions: lines.len(), touched: touched.into_iter().collect(), auto_ok })
}

/// A script that rebuilds every log and status of the corpus when replayed
/// over freshly ingested records.
pub fn export_script(corpus: &Corpus) -> String {
    let mut out = String::new();
    for r in corpus.records() {
        let id = r.id();
        for e in r.log() {
            match e {
                LogEntry::Judgment(j) => {
                    writeln!(out, "{id}\t{}\t{}\t{}", j.target, j.value, j.provenance).expect("string write")
                }
                LogEntry::Reset { .. } => writeln!(out, "{id}\t!reset").expect("string write"),
            }
        }
        match r.status() {
            RecordStatus::NotOk => {
                let ft = r.failure_type().unwrap_or_default();
                match r.comment() {
                    Some(c) => writeln!(out, "{id}\t!status\tnot-ok\t{ft}\t{}", escape(c)),
                    None => writeln!(out, "{id}\t!status\tnot-ok\t{ft}"),
                }
                .expect("string write")
            }
            s => writeln!(out, "{id}\t!status\t{s}").expect("string write"),
        }
    }
    out
}
