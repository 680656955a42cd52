//! The annotation service.
//!
//! Every sentence has its own write lock, so writes to one sentence are
//! serialized while writes to different sentences run in parallel. A write
//! that finds the lock taken fails with 409 and the client retries. Readers
//! take a snapshot of the record and never wait for a writer.
//!
//! Writes are persisted before the response is sent. Sentences typed in
//! through `/parse` live in memory only.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path as FsPath, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, MutexGuard, PoisonError, RwLock, TryLockError};

use axum::body::Bytes;
use axum::extract::{FromRequestParts, Path, State};
use axum::http::request::Parts;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use forestjudge::store::{
    find_suspects, merge, save_file, update_priors, LogEntry, MergeReport, SuspectConfig, FILE_EXTENSION,
};
use forestjudge::{
    parse_all, AutoConfig, ClassMap, Corpus, CorpusFile, EngineError, Grammar, GrammarError, ModelError, PriorTable,
    Provenance, RecordStatus, SentenceRecord, Session, SessionState, StoreConfig, StoreError, Value,
    DEFAULT_MAX_ANALYSES,
};

use crate::archive_vanished;
use crate::view::SentenceView;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, message: impl Into<String>) -> ApiError {
        ApiError { status, message: message.into() }
    }

    fn bad_request(message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::BAD_REQUEST, message)
    }

    fn conflict(message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::CONFLICT, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> ApiError {
        let status = match &e {
            StoreError::UnknownSentence(_)
            | StoreError::UnknownKey { .. }
            | StoreError::Engine(EngineError::UnknownKey(_))
            | StoreError::Model(ModelError::UnknownKey(_)) => StatusCode::NOT_FOUND,
            StoreError::Io { .. } => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e.to_string())
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> ApiError {
        StoreError::from(e).into()
    }
}

impl From<GrammarError> for ApiError {
    fn from(e: GrammarError) -> ApiError {
        ApiError::bad_request(e.to_string())
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Grammar, classes and thresholds the service works with.
#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub grammar: Grammar,
    pub classes: ClassMap,
    /// Enables automatic resolution of undecided sentences.
    pub priors: Option<PriorTable>,
    pub auto: AutoConfig,
    pub suspects: SuspectConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            grammar: Grammar::bundled(),
            classes: ClassMap::bundled(),
            priors: None,
            auto: AutoConfig::default(),
            suspects: SuspectConfig::default(),
        }
    }
}

struct Slot {
    /// Index into `AppState::files`; `None` for typed-in sentences.
    file: Option<usize>,
    writer: Mutex<()>,
    current: RwLock<Arc<SentenceRecord>>,
}

struct FileSlot {
    id: String,
    members: Vec<String>,
    save: Mutex<()>,
}

pub struct AppState {
    dir: PathBuf,
    store: StoreConfig,
    config: ServiceConfig,
    files: Vec<FileSlot>,
    order: Vec<String>,
    slots: RwLock<HashMap<String, Arc<Slot>>>,
    typed: AtomicU64,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(PoisonError::into_inner)
}

fn snapshot(slot: &Slot) -> Arc<SentenceRecord> {
    slot.current.read().unwrap_or_else(PoisonError::into_inner).clone()
}

impl AppState {
    pub fn new(corpus: Corpus, config: ServiceConfig) -> AppState {
        let dir = corpus.dir().to_path_buf();
        let store = corpus.config().clone();
        let mut files = Vec::new();
        let mut order = Vec::new();
        let mut slots = HashMap::new();
        for (fi, f) in corpus.into_files().into_iter().enumerate() {
            let mut members = Vec::new();
            for r in f.records {
                let id = r.id().to_string();
                let slot = Slot { file: Some(fi), writer: Mutex::new(()), current: RwLock::new(Arc::new(r)) };
                slots.insert(id.clone(), Arc::new(slot));
                members.push(id.clone());
                order.push(id);
            }
            files.push(FileSlot { id: f.id, members, save: Mutex::new(()) });
        }
        AppState { dir, store, config, files, order, slots: RwLock::new(slots), typed: AtomicU64::new(0) }
    }

    pub fn dir(&self) -> &FsPath {
        &self.dir
    }

    fn slot(&self, id: &str) -> ApiResult<Arc<Slot>> {
        self.slots
            .read()
            .unwrap_or_else(PoisonError::into_inner)
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown sentence {id:?}")))
    }

    pub fn record(&self, id: &str) -> ApiResult<Arc<SentenceRecord>> {
        Ok(snapshot(&*self.slot(id)?))
    }

    /// The session shown for a record: its logged judgments, plus automatic
    /// ones while the record is undecided and priors are loaded.
    pub fn session(&self, record: &SentenceRecord) -> ApiResult<Session> {
        let session = record.session()?;
        Ok(match &self.config.priors {
            Some(p) if record.status() == RecordStatus::Undecided => {
                session.auto_resolve(p, &self.config.classes, &self.config.auto)
            }
            _ => session,
        })
    }

    pub fn view(&self, record: &SentenceRecord, expert: bool) -> ApiResult<SentenceView> {
        Ok(SentenceView::build(record, &self.session(record)?, expert))
    }

    /// Applies `change` to the current record of `id` under its write lock.
    /// `change` returns `None` when there is nothing to write.
    fn write(
        &self,
        id: &str,
        change: impl FnOnce(&SentenceRecord) -> ApiResult<Option<SentenceRecord>>,
    ) -> ApiResult<Arc<SentenceRecord>> {
        let slot = self.slot(id)?;
        let _writer = match slot.writer.try_lock() {
            Ok(g) => g,
            Err(TryLockError::Poisoned(p)) => p.into_inner(),
            Err(TryLockError::WouldBlock) => {
                return Err(ApiError::conflict(format!("another write to {id} is in progress; retry")))
            }
        };
        let current = snapshot(&slot);
        let Some(next) = change(&current)? else { return Ok(current) };
        let next = Arc::new(next);
        match slot.file {
            Some(fi) => {
                let file = &self.files[fi];
                let _save = lock(&file.save);
                let records = file
                    .members
                    .iter()
                    .map(|m| if m == id { Ok((*next).clone()) } else { Ok((*self.record(m)?).clone()) })
                    .collect::<ApiResult<Vec<_>>>()?;
                let cf = CorpusFile::new(file.id.clone(), records, self.store.max_records)?;
                save_file(&cf, self.dir.join(format!("{}.{FILE_EXTENSION}", file.id)), self.store.max_records)?;
                *slot.current.write().unwrap_or_else(PoisonError::into_inner) = next.clone();
            }
            None => *slot.current.write().unwrap_or_else(PoisonError::into_inner) = next.clone(),
        }
        Ok(next)
    }

    fn records(&self) -> ApiResult<Vec<Arc<SentenceRecord>>> {
        self.order.iter().map(|id| self.record(id)).collect()
    }

    #[cfg(test)]
    fn hold_writer(&self, id: &str) -> Arc<Slot> {
        self.slot(id).unwrap()
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/files", get(list_files))
        .route("/sentences/{id}", get(get_sentence))
        .route("/sentences/{id}/judgments", post(post_judgment))
        .route("/sentences/{id}/reset", post(post_reset))
        .route("/sentences/{id}/status", post(post_status))
        .route("/suspects", get(get_suspects))
        .route("/merge", post(post_merge))
        .route("/parse", post(post_parse))
        .with_state(state)
}

pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("serving {} on http://{}", state.dir().display(), listener.local_addr()?);
    axum::serve(listener, router(state)).await?;
    Ok(())
}

fn parse_body<T: DeserializeOwned + Default>(body: &Bytes, optional: bool) -> ApiResult<T> {
    if optional && body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed body: {e}")))
}

#[derive(Debug, Default)]
struct ViewQuery {
    expert: bool,
}

impl<S: Send + Sync> FromRequestParts<S> for ViewQuery {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, _: &S) -> Result<Self, Self::Rejection> {
        let mut q = ViewQuery::default();
        for pair in parts.uri.query().unwrap_or("").split('&').filter(|p| !p.is_empty()) {
            let (name, value) = pair.split_once('=').unwrap_or((pair, "true"));
            if name != "expert" {
                continue;
            }
            q.expert = match value {
                "true" | "1" => true,
                "false" | "0" => false,
                _ => return Err(ApiError::bad_request(format!("expert must be true or false, not {value:?}"))),
            };
        }
        Ok(q)
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct SentenceSummary {
    id: String,
    text: String,
    status: RecordStatus,
    analyses: usize,
    possibly_good: usize,
    state: SessionState,
}

#[derive(Debug, Serialize)]
struct FileEntry {
    id: String,
    sentences: Vec<SentenceSummary>,
}

async fn list_files(State(st): State<Arc<AppState>>) -> ApiResult<Json<Vec<FileEntry>>> {
    let mut out = Vec::new();
    for f in &st.files {
        let mut sentences = Vec::new();
        for id in &f.members {
            let r = st.record(id)?;
            let s = st.session(&r)?;
            sentences.push(SentenceSummary {
                id: id.clone(),
                text: r.sentence().text(),
                status: r.status(),
                analyses: s.incidence().analysis_count(),
                possibly_good: s.candidates().len(),
                state: s.state(),
            });
        }
        out.push(FileEntry { id: f.id.clone(), sentences });
    }
    Ok(Json(out))
}

async fn get_sentence(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    q: ViewQuery,
) -> ApiResult<Json<SentenceView>> {
    let record = st.record(&id)?;
    Ok(Json(st.view(&record, q.expert)?))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct JudgmentRequest {
    key: String,
    value: Option<Value>,
    seq: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResetRequest {
    seq: Option<u64>,
}

/// Checks the client's sequence token. `Ok(true)` means the request was
/// already applied and must not be applied again.
fn already_applied(record: &SentenceRecord, seq: Option<u64>, same: impl Fn(&LogEntry) -> bool) -> ApiResult<bool> {
    let Some(seq) = seq else { return Ok(false) };
    let last = record.last_sequence();
    if seq == last {
        return Ok(false);
    }
    if seq < last && record.log().iter().find(|e| e.sequence() == seq + 1).is_some_and(same) {
        return Ok(true);
    }
    Err(ApiError::conflict(format!("{}: stale sequence {seq}, current is {last}", record.id())))
}

async fn post_judgment(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    q: ViewQuery,
    body: Bytes,
) -> ApiResult<Json<SentenceView>> {
    let req: JudgmentRequest = parse_body(&body, false)?;
    let value = req.value.ok_or_else(|| ApiError::bad_request("malformed body: missing field `value`"))?;
    if req.key.is_empty() {
        return Err(ApiError::bad_request("malformed body: empty key"));
    }
    let record = st.write(&id, |cur| {
        let same = |e: &LogEntry| {
            matches!(e, LogEntry::Judgment(j)
                if j.target == req.key && j.value == value && j.provenance == Provenance::User)
        };
        if already_applied(cur, req.seq, same)? {
            return Ok(None);
        }
        let mut next = cur.clone();
        next.judge(&req.key, value, Provenance::User)?;
        Ok(Some(next))
    })?;
    Ok(Json(st.view(&record, q.expert)?))
}

async fn post_reset(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    q: ViewQuery,
    body: Bytes,
) -> ApiResult<Json<SentenceView>> {
    let req: ResetRequest = parse_body(&body, true)?;
    let record = st.write(&id, |cur| {
        if already_applied(cur, req.seq, |e| matches!(e, LogEntry::Reset { .. }))? {
            return Ok(None);
        }
        let mut next = cur.clone();
        next.reset()?;
        Ok(Some(next))
    })?;
    Ok(Json(st.view(&record, q.expert)?))
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct StatusRequest {
    status: Option<RecordStatus>,
    failure_type: Option<String>,
    comment: Option<String>,
}

async fn post_status(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    q: ViewQuery,
    body: Bytes,
) -> ApiResult<Json<SentenceView>> {
    let req: StatusRequest = parse_body(&body, false)?;
    let status = req.status.ok_or_else(|| ApiError::bad_request("malformed body: missing field `status`"))?;
    let record = st.write(&id, |cur| {
        let unchanged = cur.status() == status
            && cur.failure_type() == req.failure_type.as_deref()
            && cur.comment() == req.comment.as_deref();
        if unchanged {
            return Ok(None);
        }
        let mut next = cur.clone();
        match status {
            RecordStatus::Ok => {
                // automatic values the annotator accepted become part of the log
                let shown = st.session(cur)?;
                let logged = cur.session()?;
                for (key, value) in shown.auto_assertions() {
                    if logged.value_of(key).is_none_or(|(v, by)| by == Provenance::Derived || v != *value) {
                        next.judge(key, *value, Provenance::Auto)?;
                    }
                }
                next.mark_ok()?;
            }
            RecordStatus::Undecided => next.mark_undecided(),
            RecordStatus::NotOk => {
                let ft =
                    req.failure_type.as_deref().ok_or_else(|| ApiError::bad_request("not-ok needs a failureType"))?;
                next.mark_not_ok(ft, req.comment.as_deref(), &st.store)?;
            }
        }
        Ok(Some(next))
    })?;
    Ok(Json(st.view(&record, q.expert)?))
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct SuspectView {
    id: String,
    key: String,
    display: String,
    generic_key: String,
    value: Value,
    agreement: f64,
    support: u64,
}

async fn get_suspects(State(st): State<Arc<AppState>>) -> ApiResult<Json<Vec<SuspectView>>> {
    let records = st.records()?;
    let classes = &st.config.classes;
    let priors = update_priors(records.iter().map(|r| &**r), classes)?;
    let suspects = find_suspects(records.iter().map(|r| &**r), &priors, classes, &st.config.suspects)?;
    let mut out = Vec::new();
    for s in suspects {
        let display = st.record(&s.id)?.incidence().property(&s.key).map_err(StoreError::from)?.display.clone();
        out.push(SuspectView {
            id: s.id,
            key: s.key,
            display,
            generic_key: s.generic_key,
            value: s.value,
            agreement: s.agreement,
            support: s.support,
        });
    }
    Ok(Json(out))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MergeRequest {
    id: String,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct MergeResponse {
    transferred: Vec<String>,
    vanished: Vec<String>,
    old_candidates: usize,
    new_candidates: usize,
    old_status: RecordStatus,
    new_status: RecordStatus,
    demoted: bool,
    view: SentenceView,
}

/// Re-parses a sentence with the service grammar and merges its judgments.
async fn post_merge(State(st): State<Arc<AppState>>, body: Bytes) -> ApiResult<Json<MergeResponse>> {
    let req: MergeRequest = parse_body(&body, false)?;
    let mut report: Option<MergeReport> = None;
    let record = st.write(&req.id, |cur| {
        let grammar = &st.config.grammar;
        let sentence = grammar.tokenize(cur.id(), &cur.sentence().text())?;
        let analyses = parse_all(&sentence, grammar, DEFAULT_MAX_ANALYSES)?;
        if analyses.is_empty() {
            return Err(ApiError::bad_request(format!("{}: no analyses under the current grammar", cur.id())));
        }
        let (next, r) = merge(cur, &sentence, analyses)?;
        report = Some(r);
        Ok(Some(next))
    })?;
    let report = report.expect("merge always writes");
    if st.slot(&req.id)?.file.is_some() {
        archive_vanished(&st.dir, &report)
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    }
    let keys = |js: &[forestjudge::Judgment]| js.iter().map(|j| j.target.clone()).collect();
    Ok(Json(MergeResponse {
        transferred: keys(&report.transferred),
        vanished: keys(&report.vanished),
        old_candidates: report.old_candidates,
        new_candidates: report.new_candidates,
        old_status: report.old_status,
        new_status: report.new_status,
        demoted: report.demoted(),
        view: st.view(&record, false)?,
    }))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParseRequest {
    text: String,
}

/// Type-in mode: parses a sentence into a session that is judged like any
/// other but never saved.
async fn post_parse(State(st): State<Arc<AppState>>, q: ViewQuery, body: Bytes) -> ApiResult<Json<SentenceView>> {
    let req: ParseRequest = parse_body(&body, false)?;
    let grammar = &st.config.grammar;
    let id = loop {
        let id = format!("typed-{}", st.typed.fetch_add(1, Ordering::Relaxed) + 1);
        if st.slot(&id).is_err() {
            break id;
        }
    };
    let sentence = grammar.tokenize(&id, &req.text)?;
    let analyses = parse_all(&sentence, grammar, DEFAULT_MAX_ANALYSES)?;
    if analyses.is_empty() {
        return Err(ApiError::bad_request(format!("no analyses for {:?}", req.text)));
    }
    let record = Arc::new(SentenceRecord::new(sentence, analyses)?);
    let slot = Slot { file: None, writer: Mutex::new(()), current: RwLock::new(record.clone()) };
    st.slots.write().unwrap_or_else(PoisonError::into_inner).insert(id, Arc::new(slot));
    Ok(Json(st.view(&record, q.expert)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use forestjudge::fixtures;

    fn state() -> (tempfile::TempDir, AppState) {
        let dir = tempfile::tempdir().unwrap();
        let mut corpus = Corpus::open(dir.path(), StoreConfig::default()).unwrap();
        let (s, a) = fixtures::b6();
        corpus.add_records(vec![SentenceRecord::new(s, a).unwrap()], "corpus").unwrap();
        corpus.save().unwrap();
        let st = AppState::new(corpus, ServiceConfig::default());
        (dir, st)
    }

    #[test]
    fn a_held_write_lock_yields_conflict() {
        let (_dir, st) = state();
        let slot = st.hold_writer("b6");
        let guard = slot.writer.lock().unwrap();
        let err = st.write("b6", |cur| Ok(Some(cur.clone()))).unwrap_err();
        assert_eq!(err.status, StatusCode::CONFLICT);
        // readers still get the snapshot
        assert_eq!(st.record("b6").unwrap().id(), "b6");
        drop(guard);
        assert!(st.write("b6", |cur| Ok(Some(cur.clone()))).is_ok());
    }

    #[test]
    fn store_errors_map_to_statuses() {
        let e: ApiError = StoreError::UnknownSentence("x".into()).into();
        assert_eq!(e.status, StatusCode::NOT_FOUND);
        let e: ApiError = EngineError::UnknownKey("k".into()).into();
        assert_eq!(e.status, StatusCode::NOT_FOUND);
        let e: ApiError = StoreError::UnknownFailureType("x".into()).into();
        assert_eq!(e.status, StatusCode::BAD_REQUEST);
    }
}
