//! HTTP/JSON facade over the compile and solve pipeline, used by the web UI.
//!
//! | Method | Path                     | Body / query                   |
//! |--------|--------------------------|--------------------------------|
//! | POST   | `/compile`               | `{source}`                     |
//! | POST   | `/solve`                 | `{source, seed?, encoding?}`   |
//! | POST   | `/sessions/{id}/next`    |                                |
//! | GET    | `/sessions/{id}/model`   | `?filter=RE&polarity=all\|true\|false` |
//! | GET    | `/healthz`               |                                |
//!
//! Static UI assets are served under `/ui/` when a directory is configured.
//! Every error response is `{"error": message}`, plus `diagnostics` when
//! the source was at fault.

pub mod sessions;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;
use twist_core::card::CardEncoding;
use twist_core::modelview::{ModelView, Polarity};
use twist_core::pipeline::{compile, Enumerator, Found, NumValue, SolveError, SolveOptions, Stats, Step};
use twist_core::Diagnostic;

use crate::sessions::{Advance, SessionRecord, SessionStore};

#[derive(Debug, Clone)]
pub struct Config {
    pub session_ttl: Duration,
    pub max_sessions: usize,
    pub max_body: usize,
    /// Defaults for every solve; `seed` and `encoding` may be overridden
    /// per request.
    pub solve: SolveOptions,
    pub ui_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            session_ttl: Duration::from_secs(30 * 60),
            max_sessions: 64,
            max_body: 1 << 20,
            solve: SolveOptions::default(),
            ui_dir: None,
        }
    }
}

#[derive(Clone)]
pub struct AppState {
    pub config: Arc<Config>,
    pub sessions: Arc<SessionStore>,
}

impl AppState {
    pub fn new(config: Config) -> Self {
        let sessions = SessionStore::new(config.session_ttl, config.max_sessions);
        AppState {
            config: Arc::new(config),
            sessions: Arc::new(sessions),
        }
    }
}

pub fn app(state: AppState) -> Router {
    let max_body = state.config.max_body;
    let ui = state.config.ui_dir.clone();
    let mut router = Router::new()
        .route("/healthz", get(|| async { "ok" }))
        .route("/compile", post(compile_handler))
        .route("/solve", post(solve_handler))
        .route("/sessions/{id}/next", post(next_handler))
        .route("/sessions/{id}/model", get(model_handler))
        .layer(DefaultBodyLimit::max(max_body))
        .with_state(state);
    if let Some(dir) = ui {
        router = router.nest_service("/ui", ServeDir::new(dir));
    }
    router
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    diagnostics: Vec<Diagnostic>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
            diagnostics: Vec::new(),
        }
    }

    fn not_found() -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "unknown or expired session")
    }
}

impl From<SolveError> for ApiError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Internal(m) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, m),
            SolveError::Solver(m) => ApiError::new(StatusCode::BAD_GATEWAY, m),
        }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    #[serde(skip_serializing_if = "<[Diagnostic]>::is_empty")]
    diagnostics: &'a [Diagnostic],
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: &self.message,
            diagnostics: &self.diagnostics,
        };
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

/// JSON body of a POST; empty or malformed bodies are a 400.
fn body<T: for<'de> Deserialize<'de>>(bytes: &Bytes) -> Result<T, ApiError> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "empty request body"));
    }
    serde_json::from_slice(bytes).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("invalid request: {e}")))
}

#[derive(Deserialize)]
struct CompileRequest {
    source: String,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct CompileResponse {
    pub ok: bool,
    pub latex: Option<String>,
    pub stats: Option<Stats>,
    pub diagnostics: Vec<Diagnostic>,
}

async fn compile_handler(bytes: Bytes) -> ApiResult<CompileResponse> {
    let req: CompileRequest = body(&bytes)?;
    // Grounding and clause generation can be heavy for large programs.
    let resp = tokio::task::spawn_blocking(move || compile_source(&req.source))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    Ok(Json(resp))
}

/// What `POST /compile` answers for `source`. Problems in the source are
/// reported in the body, never as an HTTP error.
pub fn compile_source(source: &str) -> CompileResponse {
    let c = match compile(source) {
        Ok(c) => c,
        Err(diagnostics) => {
            return CompileResponse {
                ok: false,
                latex: None,
                stats: None,
                diagnostics,
            }
        }
    };
    let mut diagnostics = c.warnings.clone();
    let latex = Some(c.latex());
    match c.backend(CardEncoding::Auto) {
        Ok(b) => CompileResponse {
            ok: true,
            latex,
            stats: Some(b.stats()),
            diagnostics,
        },
        Err(d) => {
            diagnostics.push(d);
            CompileResponse {
                ok: false,
                latex,
                stats: None,
                diagnostics,
            }
        }
    }
}

#[derive(Deserialize)]
struct SolveRequest {
    source: String,
    seed: Option<u64>,
    encoding: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
    Exhausted,
}

/// Answer of `/solve` and `/sessions/{id}/next`. `session_id` is present
/// only on `/solve` with status `sat`; `model` and `values` only with a
/// model.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SolveResponse {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<Vec<RowOut>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<ValueOut>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RowOut {
    pub atom: String,
    pub value: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ValueOut {
    pub name: String,
    pub value: String,
}

fn rows_out(v: &ModelView) -> Vec<RowOut> {
    v.rows
        .iter()
        .map(|r| RowOut {
            atom: r.atom.clone(),
            value: r.value,
        })
        .collect()
}

fn values_out(v: &[NumValue]) -> Vec<ValueOut> {
    v.iter()
        .map(|n| ValueOut {
            name: n.name.clone(),
            value: n.value.clone(),
        })
        .collect()
}

impl SolveResponse {
    fn with_model(status: Status, f: &Found) -> Self {
        SolveResponse {
            session_id: None,
            status,
            model: Some(rows_out(&f.rows)),
            values: Some(values_out(&f.values)),
        }
    }

    fn bare(status: Status) -> Self {
        SolveResponse {
            session_id: None,
            status,
            model: None,
            values: None,
        }
    }
}

async fn solve_handler(State(st): State<AppState>, bytes: Bytes) -> ApiResult<SolveResponse> {
    let req: SolveRequest = body(&bytes)?;
    let mut opts = st.config.solve.clone();
    if let Some(seed) = req.seed {
        opts.seed = seed;
    }
    if let Some(enc) = &req.encoding {
        opts.encoding = enc
            .parse()
            .map_err(|m: String| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, m))?;
    }
    if !st.sessions.has_room() {
        return Err(ApiError::new(StatusCode::TOO_MANY_REQUESTS, "too many open sessions"));
    }
    let c = compile(&req.source).map_err(|diagnostics| ApiError {
        status: StatusCode::UNPROCESSABLE_ENTITY,
        message: "the source has errors".into(),
        diagnostics,
    })?;
    let backend = c.backend(opts.encoding).map_err(|d| ApiError {
        status: StatusCode::UNPROCESSABLE_ENTITY,
        message: d.message.clone(),
        diagnostics: vec![d],
    })?;
    let (step, enumerator) = tokio::task::spawn_blocking(move || {
        let mut e = Enumerator::new(&c, backend, &opts);
        e.next_model().map(|s| (s, e))
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    match step {
        Step::Model(first) => {
            let mut resp = SolveResponse::with_model(Status::Sat, &first);
            let id = st
                .sessions
                .insert(SessionRecord::new(enumerator, first))
                .map_err(|_| ApiError::new(StatusCode::TOO_MANY_REQUESTS, "too many open sessions"))?;
            resp.session_id = Some(id);
            Ok(Json(resp))
        }
        Step::Exhausted => Ok(Json(SolveResponse::bare(Status::Unsat))),
        Step::Unknown => Ok(Json(SolveResponse::bare(Status::Unknown))),
    }
}

async fn next_handler(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<SolveResponse> {
    let rec = st.sessions.get(&id).ok_or_else(ApiError::not_found)?;
    // The record lock is taken on the blocking thread, so concurrent calls
    // on one session queue up there in arrival order of the lock.
    let adv = tokio::task::spawn_blocking(move || {
        let mut r = rec.lock().unwrap_or_else(|e| e.into_inner());
        r.advance()
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(Json(match adv {
        Advance::Model(f) => SolveResponse::with_model(Status::Sat, &f),
        Advance::Exhausted => SolveResponse::bare(Status::Exhausted),
        Advance::Unknown => SolveResponse::bare(Status::Unknown),
    }))
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ModelResponse {
    pub model: Vec<RowOut>,
    pub values: Vec<ValueOut>,
}

async fn model_handler(
    State(st): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult<ModelResponse> {
    let rec = st.sessions.get(&id).ok_or_else(ApiError::not_found)?;
    let filter = q.get("filter").map(String::as_str).unwrap_or("");
    let polarity: Polarity = q
        .get("polarity")
        .map(String::as_str)
        .unwrap_or("all")
        .parse()
        .map_err(|m: String| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, m))?;
    // Waits behind any `next` running on this session.
    let current = tokio::task::spawn_blocking(move || {
        let r = rec.lock().unwrap_or_else(|e| e.into_inner());
        r.current().clone()
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    let f = current
        .filtered(filter, polarity)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    Ok(Json(ModelResponse {
        model: rows_out(&f.rows),
        values: values_out(&f.values),
    }))
}
