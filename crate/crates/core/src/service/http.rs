use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Component, Path as FsPath, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::engine::{DetectionReport, Engine, IngestMode, IngestSummary};
use crate::classifier::{train_with_callback, EpochStats};
use crate::corpus::{read_jsonl, Segment, TextPair};
use crate::error::Error;

/// Shared server state: the engine behind a reader-writer lock, plus the
/// job table for ingest and training.
#[derive(Clone)]
pub struct AppState {
    inner: Arc<Shared>,
}

struct Shared {
    engine: RwLock<Engine>,
    jobs: Mutex<HashMap<u64, JobStatus>>,
    busy: AtomicBool,
    next_job: AtomicU64,
    ui_dir: Option<PathBuf>,
    engine_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum JobStatus {
    Running { epochs_done: usize },
    Succeeded { history: Vec<EpochStats> },
    Failed { error: String },
}

#[derive(Debug, Clone, Default)]
pub struct ServeOptions {
    /// Directory served under `/ui`.
    pub ui_dir: Option<PathBuf>,
    /// When set, the engine is saved here after every ingest and training job.
    pub engine_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new(engine: Engine, options: ServeOptions) -> Self {
        AppState {
            inner: Arc::new(Shared {
                engine: RwLock::new(engine),
                jobs: Mutex::new(HashMap::new()),
                busy: AtomicBool::new(false),
                next_job: AtomicU64::new(1),
                ui_dir: options.ui_dir,
                engine_dir: options.engine_dir,
            }),
        }
    }

    /// Runs `f` with read access to the engine.
    pub fn with_engine<T>(&self, f: impl FnOnce(&Engine) -> T) -> T {
        f(&self.inner.engine.read().unwrap_or_else(|e| e.into_inner()))
    }

    pub fn job(&self, id: u64) -> Option<JobStatus> {
        self.inner
            .jobs
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .get(&id)
            .cloned()
    }

    fn set_job(&self, id: u64, status: JobStatus) {
        self.inner
            .jobs
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert(id, status);
    }

    fn claim(&self) -> Result<BusyGuard, ApiError> {
        if self.inner.busy.swap(true, Ordering::AcqRel) {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "another ingest or training job is running",
            ));
        }
        Ok(BusyGuard(self.inner.clone()))
    }

    fn persist(&self) -> crate::Result<()> {
        match &self.inner.engine_dir {
            Some(dir) => self.with_engine(|e| e.save(dir)),
            None => Ok(()),
        }
    }
}

struct BusyGuard(Arc<Shared>);

impl Drop for BusyGuard {
    fn drop(&mut self) {
        self.0.busy.store(false, Ordering::Release);
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::EmptyIndex | Error::ModelNotTrained => StatusCode::CONFLICT,
            Error::RemoteUnavailable(_) | Error::PartialResponse { .. } => StatusCode::BAD_GATEWAY,
            Error::Io(_) | Error::BindFailure { .. } => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn parse<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("invalid request body: {e}")))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectRequest {
    pub text: String,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub nprobe: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestRequest {
    pub corpus: Vec<Segment>,
    #[serde(default)]
    pub mode: IngestMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainRequest {
    /// Path of a dataset JSONL file on the server.
    pub dataset: PathBuf,
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/config", get(config))
        .route("/ingest", post(ingest))
        .route("/detect", post(detect))
        .route("/segments/{id}", get(segment))
        .route("/train", post(train))
        .route("/jobs/{id}", get(job))
        .route("/ui", get(ui_index))
        .route("/ui/", get(ui_index))
        .route("/ui/{*path}", get(ui_file))
        .with_state(state)
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

async fn config(State(state): State<AppState>) -> Json<super::EngineConfig> {
    Json(state.with_engine(|e| e.config().clone()))
}

async fn detect(State(state): State<AppState>, body: Bytes) -> ApiResult<Json<DetectionReport>> {
    let req: DetectRequest = parse(&body)?;
    let report = blocking(move || Ok(state.with_engine(|e| e.detect(&req.text, req.k, req.nprobe))?)).await?;
    Ok(Json(report))
}

async fn segment(State(state): State<AppState>, Path(id): Path<u64>) -> ApiResult<Json<Segment>> {
    state
        .with_engine(|e| e.segment(id).cloned())
        .map(Json)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no segment with id {id}")))
}

async fn ingest(State(state): State<AppState>, body: Bytes) -> ApiResult<Json<IngestSummary>> {
    let req: IngestRequest = parse(&body)?;
    let guard = state.claim()?;
    let summary = blocking(move || {
        let _guard = guard;
        let summary = {
            let mut engine = state.inner.engine.write().unwrap_or_else(|e| e.into_inner());
            engine.ingest(req.corpus, req.mode)?
        };
        state.persist()?;
        Ok(summary)
    })
    .await?;
    Ok(Json(summary))
}

async fn train(State(state): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let req: TrainRequest = parse(&body)?;
    let guard = state.claim()?;
    let id = state.inner.next_job.fetch_add(1, Ordering::Relaxed);
    state.set_job(id, JobStatus::Running { epochs_done: 0 });
    tokio::task::spawn_blocking(move || {
        let _guard = guard;
        let status = match run_training(&state, id, &req.dataset) {
            Ok(history) => JobStatus::Succeeded { history },
            Err(e) => JobStatus::Failed { error: e.to_string() },
        };
        state.set_job(id, status);
    });
    Ok((StatusCode::ACCEPTED, Json(json!({ "job_id": id }))).into_response())
}

/// Embeds and trains against a snapshot of the embedder, so queries keep
/// running; only installing the parameters takes the write lock.
fn run_training(state: &AppState, job: u64, dataset: &FsPath) -> crate::Result<Vec<EpochStats>> {
    let pairs: Vec<TextPair> = read_jsonl(dataset)?;
    let (labeled, cfg) = state.with_engine(|e| Ok::<_, Error>((e.embed_pairs(&pairs)?, e.train_config())))?;
    let outcome = train_with_callback(&labeled, &cfg, |s| {
        state.set_job(job, JobStatus::Running { epochs_done: s.epoch })
    })?;
    state
        .inner
        .engine
        .write()
        .unwrap_or_else(|e| e.into_inner())
        .set_params(outcome.params)?;
    state.persist()?;
    Ok(outcome.history)
}

async fn job(State(state): State<AppState>, Path(id): Path<u64>) -> ApiResult<Json<JobStatus>> {
    state
        .job(id)
        .map(Json)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no job with id {id}")))
}

async fn ui_index(State(state): State<AppState>) -> ApiResult<Response> {
    serve_static(&state, "index.html").await
}

async fn ui_file(State(state): State<AppState>, Path(path): Path<String>) -> ApiResult<Response> {
    serve_static(&state, &path).await
}

async fn serve_static(state: &AppState, rel: &str) -> ApiResult<Response> {
    let not_found = || ApiError::new(StatusCode::NOT_FOUND, format!("no ui asset {rel}"));
    let root = state
        .inner
        .ui_dir
        .as_ref()
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "no ui directory configured"))?;
    let rel_path = FsPath::new(rel);
    if rel_path.components().any(|c| !matches!(c, Component::Normal(_))) {
        return Err(not_found());
    }
    let mut path = root.join(rel_path);
    if path.is_dir() {
        path.push("index.html");
    }
    let bytes = tokio::fs::read(&path).await.map_err(|_| not_found())?;
    let mime = match path.extension().and_then(|e| e.to_str()) {
        Some("html") => "text/html; charset=utf-8",
        Some("js" | "mjs") => "text/javascript; charset=utf-8",
        Some("css") => "text/css; charset=utf-8",
        Some("json") => "application/json",
        Some("svg") => "image/svg+xml",
        Some("png") => "image/png",
        Some("ico") => "image/x-icon",
        _ => "application/octet-stream",
    };
    Ok(([(header::CONTENT_TYPE, mime)], bytes).into_response())
}

/// Binds `addr` and serves until the process exits.
pub fn serve(engine: Engine, addr: &str, options: ServeOptions) -> crate::Result<()> {
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async move {
        let listener = bind(addr).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        run(listener, AppState::new(engine, options)).await
    })
}

pub async fn bind(addr: &str) -> crate::Result<tokio::net::TcpListener> {
    tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| Error::BindFailure {
            addr: addr.to_string(),
            source,
        })
}

pub async fn run(listener: tokio::net::TcpListener, state: AppState) -> crate::Result<()> {
    axum::serve(listener, router(state)).await?;
    Ok(())
}

/// Starts a server on a background runtime thread and returns its address.
/// Used by examples and tests; the server lives until the process exits.
pub fn spawn_background(engine: Engine, addr: &str, options: ServeOptions) -> crate::Result<SocketAddr> {
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .worker_threads(2)
        .enable_all()
        .build()?;
    let listener = runtime.block_on(bind(addr))?;
    let local = listener.local_addr()?;
    let state = AppState::new(engine, options);
    std::thread::spawn(move || {
        let _ = runtime.block_on(run(listener, state));
    });
    Ok(local)
}
