//! The corpus file format: JSON lines, a header object followed by one
//! object per sentence record.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::{Analysis, Judgment, Node, Provenance, SenseTag, Sentence, SentenceType, Token, Value};

use super::record::{LogEntry, RecordStatus, SentenceRecord};
use super::StoreError;

pub const FORMAT_NAME: &str = "forestjudge-corpus";
pub const FORMAT_VERSION: u32 = 1;

/// An ordered group of sentence records saved together.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusFile {
    pub id: String,
    pub records: Vec<SentenceRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format: String,
    version: u32,
    file: String,
    records: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordWire {
    id: String,
    tokens: Vec<TokenWire>,
    analyses: Vec<AnalysisWire>,
    log: Vec<LogWire>,
    status: RecordStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    failure_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    comment: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TokenWire {
    surface: String,
    pos: String,
    lemma: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalysisWire {
    #[serde(rename = "type")]
    sentence_type: SentenceType,
    tree: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    senses: BTreeMap<usize, SenseTag>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LogWire {
    Judgment { seq: u64, key: String, value: Value, by: Provenance },
    Reset { seq: u64, reset: bool },
}

impl CorpusFile {
    pub fn new(
        id: impl Into<String>,
        records: Vec<SentenceRecord>,
        max_records: usize,
    ) -> Result<CorpusFile, StoreError> {
        let file = CorpusFile { id: id.into(), records };
        file.check(max_records)?;
        Ok(file)
    }

    pub fn check(&self, max_records: usize) -> Result<(), StoreError> {
        if self.records.is_empty() {
            return Err(StoreError::EmptyFile(self.id.clone()));
        }
        if self.records.len() > max_records {
            return Err(StoreError::TooManyRecords {
                file: self.id.clone(),
                count: self.records.len(),
                limit: max_records,
            });
        }
        let mut seen = std::collections::HashSet::new();
        for r in &self.records {
            if !seen.insert(r.id()) {
                return Err(StoreError::DuplicateSentence(r.id().to_string()));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let header = Header {
            format: FORMAT_NAME.to_string(),
            version: FORMAT_VERSION,
            file: self.id.clone(),
            records: self.records.len(),
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(&to_wire(r)).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    /// Parses a corpus file. `origin` names the source in error messages.
    pub fn from_text(text: &str, origin: &str, max_records: usize) -> Result<CorpusFile, StoreError> {
        let err = |line: usize, record: Option<usize>, message: String| StoreError::Format {
            path: origin.to_string(),
            line,
            record,
            message,
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, first) = lines.next().ok_or_else(|| err(1, None, "missing header".into()))?;
        let header: Header = serde_json::from_str(first).map_err(|e| err(1, None, format!("bad header: {e}")))?;
        if header.format != FORMAT_NAME {
            return Err(err(1, None, format!("not a corpus file (format {:?})", header.format)));
        }
        if header.version != FORMAT_VERSION {
            return Err(StoreError::Version {
                path: origin.to_string(),
                found: header.version,
                expected: FORMAT_VERSION,
            });
        }
        let mut records = Vec::new();
        for (line, body) in lines {
            let index = records.len() + 1;
            if body.trim().is_empty() {
                return Err(err(line, Some(index), "blank line".into()));
            }
            let wire: RecordWire = serde_json::from_str(body).map_err(|e| err(line, Some(index), e.to_string()))?;
            records.push(from_wire(wire).map_err(|e| err(line, Some(index), e.to_string()))?);
        }
        if records.len() != header.records {
            let missing = records.len() + 1;
            return Err(err(
                text.lines().count() + 1,
                Some(missing.min(header.records.max(1))),
                format!("header declares {} records, found {}", header.records, records.len()),
            ));
        }
        let file = CorpusFile { id: header.file, records };
        file.check(max_records)?;
        Ok(file)
    }
}

fn to_wire(r: &SentenceRecord) -> RecordWire {
    let s = r.sentence();
    RecordWire {
        id: s.id.clone(),
        tokens: s
            .tokens
            .iter()
            .map(|t| TokenWire { surface: t.surface.clone(), pos: t.pos.clone(), lemma: t.lemma.clone() })
            .collect(),
        analyses: r
            .analyses()
            .iter()
            .map(|a| AnalysisWire {
                sentence_type: a.sentence_type,
                tree: a.tree.to_bracketed(s),
                senses: a.senses.clone(),
            })
            .collect(),
        log: r
            .log()
            .iter()
            .map(|e| match e {
                LogEntry::Judgment(j) => {
                    LogWire::Judgment { seq: j.sequence, key: j.target.clone(), value: j.value, by: j.provenance }
                }
                LogEntry::Reset { sequence } => LogWire::Reset { seq: *sequence, reset: true },
            })
            .collect(),
        status: r.status(),
        failure_type: r.failure_type().map(str::to_string),
        comment: r.comment().map(str::to_string),
    }
}

fn from_wire(w: RecordWire) -> Result<SentenceRecord, StoreError> {
    let tokens = w.tokens.into_iter().enumerate().map(|(i, t)| Token::new(i, t.surface, t.pos, t.lemma)).collect();
    let sentence = Sentence::new(w.id, tokens)?;
    let mut analyses = Vec::with_capacity(w.analyses.len());
    for a in w.analyses {
        let tree = Node::parse_bracketed(&a.tree, &sentence)?;
        let analysis = Analysis::new(tree, a.senses, a.sentence_type);
        analysis.validate(&sentence)?;
        analyses.push(analysis);
    }
    let mut log = Vec::with_capacity(w.log.len());
    for e in w.log {
        log.push(match e {
            LogWire::Judgment { seq, key, value, by } => {
                LogEntry::Judgment(Judgment { target: key, value, provenance: by, sequence: seq })
            }
            LogWire::Reset { seq, reset: true } => LogEntry::Reset { sequence: seq },
            LogWire::Reset { reset: false, .. } => {
                return Err(StoreError::Invalid("log entry with reset=false".into()));
            }
        });
    }
    SentenceRecord::from_parts(sentence, analyses, log, w.status, w.failure_type, w.comment)
}

/// Writes the file atomically: a sibling temporary file renamed into place.
pub fn save_file(file: &CorpusFile, path: impl AsRef<Path>, max_records: usize) -> Result<(), StoreError> {
    let path = path.as_ref();
    file.check(max_records)?;
    let text = file.to_text();
    if fs::read(path).is_ok_and(|old| old == text.as_bytes()) {
        return Ok(());
    }
    let tmp = path.with_extension("fjc.tmp");
    let mut f = fs::File::create(&tmp).map_err(|e| StoreError::io(&tmp, e))?;
    f.write_all(text.as_bytes()).map_err(|e| StoreError::io(&tmp, e))?;
    f.sync_all().map_err(|e| StoreError::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| StoreError::io(path, e))
}

pub fn load_file(path: impl AsRef<Path>, max_records: usize) -> Result<CorpusFile, StoreError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| StoreError::io(path, e))?;
    CorpusFile::from_text(&text, &path.display().to_string(), max_records)
}
