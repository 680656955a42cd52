use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::model::Provenance;

use super::format::{load_file, save_file, CorpusFile};
use super::record::{RecordStatus, SentenceRecord};
use super::{StoreConfig, StoreError};

pub const FILE_EXTENSION: &str = "fjc";

/// A directory of corpus files.
#[derive(Debug, Clone)]
pub struct Corpus {
    dir: PathBuf,
    config: StoreConfig,
    files: Vec<CorpusFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub sentences: usize,
    pub undecided: usize,
    pub ok: usize,
    pub not_ok: usize,
    /// Number of effective user judgments per sentence -> number of sentences.
    pub judgments_histogram: BTreeMap<usize, usize>,
}

impl Corpus {
    /// An unsaved corpus over `dir` holding the given files.
    pub fn from_files(
        dir: impl Into<PathBuf>,
        config: StoreConfig,
        files: Vec<CorpusFile>,
    ) -> Result<Corpus, StoreError> {
        let corpus = Corpus { dir: dir.into(), config, files };
        corpus.check()?;
        Ok(corpus)
    }

    /// Loads every corpus file in `dir`, ordered by file name. A missing
    /// directory is an empty corpus.
    pub fn open(dir: impl Into<PathBuf>, config: StoreConfig) -> Result<Corpus, StoreError> {
        let dir = dir.into();
        let mut paths = Vec::new();
        if dir.exists() {
            for entry in fs::read_dir(&dir).map_err(|e| StoreError::io(&dir, e))? {
                let path = entry.map_err(|e| StoreError::io(&dir, e))?.path();
                if path.extension().is_some_and(|e| e == FILE_EXTENSION) {
                    paths.push(path);
                }
            }
        }
        paths.sort();
        let files = paths.iter().map(|p| load_file(p, config.max_records)).collect::<Result<Vec<_>, _>>()?;
        Corpus::from_files(dir, config, files)
    }

    fn check(&self) -> Result<(), StoreError> {
        let mut ids = HashSet::new();
        let mut file_ids = HashSet::new();
        for f in &self.files {
            f.check(self.config.max_records)?;
            if !file_ids.insert(f.id.as_str()) {
                return Err(StoreError::Invalid(format!("duplicate corpus file id {:?}", f.id)));
            }
            for r in &f.records {
                if !ids.insert(r.id()) {
                    return Err(StoreError::DuplicateSentence(r.id().to_string()));
                }
            }
        }
        Ok(())
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn config(&self) -> &StoreConfig {
        &self.config
    }

    pub fn files(&self) -> &[CorpusFile] {
        &self.files
    }

    pub fn into_files(self) -> Vec<CorpusFile> {
        self.files
    }

    pub fn path_of(&self, file_id: &str) -> PathBuf {
        self.dir.join(format!("{file_id}.{FILE_EXTENSION}"))
    }

    pub fn len(&self) -> usize {
        self.files.iter().map(|f| f.records.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn records(&self) -> impl Iterator<Item = &SentenceRecord> {
        self.files.iter().flat_map(|f| f.records.iter())
    }

    pub fn records_mut(&mut self) -> impl Iterator<Item = &mut SentenceRecord> {
        self.files.iter_mut().flat_map(|f| f.records.iter_mut())
    }

    /// (file position, record position) of a sentence.
    pub fn locate(&self, id: &str) -> Option<(usize, usize)> {
        self.files.iter().enumerate().find_map(|(fi, f)| f.records.iter().position(|r| r.id() == id).map(|ri| (fi, ri)))
    }

    pub fn record(&self, id: &str) -> Result<&SentenceRecord, StoreError> {
        let (f, r) = self.locate(id).ok_or_else(|| StoreError::UnknownSentence(id.to_string()))?;
        Ok(&self.files[f].records[r])
    }

    pub fn record_mut(&mut self, id: &str) -> Result<&mut SentenceRecord, StoreError> {
        let (f, r) = self.locate(id).ok_or_else(|| StoreError::UnknownSentence(id.to_string()))?;
        Ok(&mut self.files[f].records[r])
    }

    /// Appends records, filling the last file up to the size cap and then
    /// starting new files named `<prefix>-NNNN`.
    pub fn add_records(&mut self, records: Vec<SentenceRecord>, prefix: &str) -> Result<(), StoreError> {
        for r in &records {
            if self.locate(r.id()).is_some() {
                return Err(StoreError::DuplicateSentence(r.id().to_string()));
            }
        }
        for r in records {
            let full = self.files.last().is_none_or(|f| f.records.len() >= self.config.max_records);
            if full {
                let mut n = self.files.len() + 1;
                let id = loop {
                    let id = format!("{prefix}-{n:04}");
                    if !self.files.iter().any(|f| f.id == id) {
                        break id;
                    }
                    n += 1;
                };
                self.files.push(CorpusFile { id, records: Vec::new() });
            }
            self.files.last_mut().expect("just ensured").records.push(r);
        }
        self.check()
    }

    /// Writes every file. Files whose bytes are unchanged are not touched.
    pub fn save(&self) -> Result<(), StoreError> {
        self.save_to(&self.dir)
    }

    /// Writes every file into another directory.
    pub fn save_to(&self, dir: impl AsRef<Path>) -> Result<(), StoreError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| StoreError::io(dir, e))?;
        for f in &self.files {
            save_file(f, dir.join(format!("{}.{FILE_EXTENSION}", f.id)), self.config.max_records)?;
        }
        Ok(())
    }

    /// Writes the file holding sentence `id`.
    pub fn save_containing(&self, id: &str) -> Result<(), StoreError> {
        let (f, _) = self.locate(id).ok_or_else(|| StoreError::UnknownSentence(id.to_string()))?;
        fs::create_dir_all(&self.dir).map_err(|e| StoreError::io(&self.dir, e))?;
        let file = &self.files[f];
        save_file(file, self.path_of(&file.id), self.config.max_records)
    }

    /// Not-OK records of the given type across all files, in corpus order.
    pub fn list_failures(&self, failure_type: &str) -> Result<Vec<&SentenceRecord>, StoreError> {
        if !self.config.failure_types.iter().any(|t| t == failure_type) {
            return Err(StoreError::UnknownFailureType(failure_type.to_string()));
        }
        Ok(self
            .records()
            .filter(|r| r.status() == RecordStatus::NotOk && r.failure_type() == Some(failure_type))
            .collect())
    }

    pub fn stats(&self) -> CorpusStats {
        let mut stats =
            CorpusStats { sentences: 0, undecided: 0, ok: 0, not_ok: 0, judgments_histogram: BTreeMap::new() };
        for r in self.records() {
            stats.sentences += 1;
            match r.status() {
                RecordStatus::Undecided => stats.undecided += 1,
                RecordStatus::Ok => stats.ok += 1,
                RecordStatus::NotOk => stats.not_ok += 1,
            }
            let mut keys: Vec<&str> = r
                .effective_judgments()
                .filter(|j| j.provenance == Provenance::User)
                .map(|j| j.target.as_str())
                .collect();
            keys.sort_unstable();
            keys.dedup();
            *stats.judgments_histogram.entry(keys.len()).or_default() += 1;
        }
        stats
    }
}
