//! HTTP API over helix sessions: create, tilt, undo, height functions and webs.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock as StdRwLock};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use helixtilt_core::helix::HELIX_D;
use helixtilt_core::seeds::seed_helix;
use helixtilt_core::{
    build_height_function, cross_check_tilt, enumerate_height_functions, helix_quiver,
    rolled_b_matrix, web_bfs, BMatrix64, Collection, CrossCheckReport, ExcError, ExcObject64,
    ExplorerError, Helix64, HelixError, Levelling, Quiver64, QuiverError, Side, Surface,
    WebGraph64,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tokio::sync::RwLock;
use tower_http::cors::CorsLayer;

pub const DEFAULT_PORT: u16 = 8080;
pub const MAX_WEB_DEPTH: usize = 6;
pub const DEFAULT_HEIGHT_BOUND: i64 = 3;
pub const MAX_HEIGHT_BOUND: i64 = 12;

/// `HELIX_PORT` if set and valid, otherwise [`DEFAULT_PORT`].
pub fn port_from_env() -> u16 {
    std::env::var("HELIX_PORT").ok().and_then(|p| p.parse().ok()).unwrap_or(DEFAULT_PORT)
}

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("{0}")]
    BadRequest(String),
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("{message}")]
    Unprocessable { reason: &'static str, message: String },
    #[error("{0}")]
    Internal(String),
}

impl ApiError {
    fn unprocessable(reason: &'static str, message: impl Into<String>) -> Self {
        ApiError::Unprocessable { reason, message: message.into() }
    }

    pub fn reason(&self) -> &'static str {
        match self {
            ApiError::BadRequest(_) => "malformed_request",
            ApiError::UnknownSession(_) => "unknown_session",
            ApiError::Unprocessable { reason, .. } => reason,
            ApiError::Internal(_) => "internal",
        }
    }

    fn status(&self) -> StatusCode {
        match self {
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ApiError::Unprocessable { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::json!({ "error": self.reason(), "message": self.to_string() });
        (self.status(), Json(body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::BadRequest(r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::BadRequest(r.body_text())
    }
}

impl From<HelixError> for ApiError {
    fn from(e: HelixError) -> Self {
        let reason = match &e {
            HelixError::Collection(ExcError::Lattice(_)) => "invalid_class",
            HelixError::Collection(ExcError::NotFull { .. }) => "not_full",
            HelixError::Collection(_) => "not_exceptional",
            HelixError::UnsupportedType(_) | HelixError::PeriodMismatch { .. } => "unsupported_helix",
            HelixError::NotStrong(..) => "not_strong",
            HelixError::NotGeometric(..) => "not_geometric",
            HelixError::VertexOutOfRange { .. } => "bad_vertex",
            HelixError::NoHeightFunction(_) | HelixError::Reorder(_) => "no_height_function",
            HelixError::InvalidLevelling(_) | HelixError::NoContainingThread(_) => "invalid_levelling",
            HelixError::Invariant(_) => "invariant_breach",
        };
        ApiError::unprocessable(reason, e.to_string())
    }
}

impl From<QuiverError> for ApiError {
    fn from(e: QuiverError) -> Self {
        match e {
            QuiverError::Helix(h) => h.into(),
            QuiverError::VertexOutOfRange { .. } => ApiError::unprocessable("bad_vertex", e.to_string()),
            QuiverError::Overflow(_) => ApiError::unprocessable("overflow", e.to_string()),
            other => ApiError::unprocessable("invariant_breach", other.to_string()),
        }
    }
}

impl From<ExplorerError> for ApiError {
    fn from(e: ExplorerError) -> Self {
        match e {
            ExplorerError::Quiver(q) => q.into(),
            other => ApiError::unprocessable("invariant_breach", other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub vertex: usize,
    pub direction: Side,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub helix: Helix64,
    /// Earlier helices with the move that left each of them.
    pub history: Vec<(Helix64, Move)>,
}

/// Shared server state. Each session has its own lock so mutations are
/// serialized per session while distinct sessions proceed independently.
#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<StdRwLock<HashMap<String, Arc<RwLock<Session>>>>>,
    snapshot_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new(snapshot_dir: Option<PathBuf>) -> Self {
        AppState { sessions: Arc::default(), snapshot_dir }
    }

    /// Loads every `*.json` session snapshot in the configured directory.
    pub fn load_snapshots(&self) -> std::io::Result<usize> {
        let Some(dir) = &self.snapshot_dir else { return Ok(0) };
        std::fs::create_dir_all(dir)?;
        let mut loaded = 0;
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "json") {
                let text = std::fs::read_to_string(&path)?;
                if let Ok(session) = serde_json::from_str::<Session>(&text) {
                    self.insert(session);
                    loaded += 1;
                }
            }
        }
        Ok(loaded)
    }

    fn insert(&self, session: Session) -> Arc<RwLock<Session>> {
        let id = session.id.clone();
        let entry = Arc::new(RwLock::new(session));
        self.sessions.write().expect("session map poisoned").insert(id, entry.clone());
        entry
    }

    fn get(&self, id: &str) -> Result<Arc<RwLock<Session>>, ApiError> {
        self.sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::UnknownSession(id.to_string()))
    }

    async fn persist(&self, session: &Session) -> Result<(), ApiError> {
        let Some(dir) = &self.snapshot_dir else { return Ok(()) };
        let text = serde_json::to_string(session).map_err(|e| ApiError::Internal(e.to_string()))?;
        tokio::fs::create_dir_all(dir).await.map_err(|e| ApiError::Internal(e.to_string()))?;
        tokio::fs::write(dir.join(format!("{}.json", session.id)), text)
            .await
            .map_err(|e| ApiError::Internal(e.to_string()))
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum CreateRequest {
    Seed {
        seed: String,
    },
    Explicit {
        surface: Surface,
        #[serde(alias = "objects")]
        thread: Vec<ExcObject64>,
        #[serde(default)]
        d: Option<i64>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StateView {
    pub id: String,
    pub surface: Surface,
    pub objects: Vec<ExcObject64>,
    pub labels: Vec<String>,
    pub quiver: Quiver64,
    pub b_matrix: BMatrix64,
    pub history: usize,
}

fn view(session: &Session) -> Result<StateView, ApiError> {
    let h = &session.helix;
    Ok(StateView {
        id: session.id.clone(),
        surface: h.surface(),
        objects: h.thread().objects().to_vec(),
        labels: h.thread().labels(),
        quiver: helix_quiver(h)?,
        b_matrix: rolled_b_matrix(h)?,
        history: session.history.len(),
    })
}

fn helix_from_request(req: CreateRequest) -> Result<Helix64, ApiError> {
    let h = match req {
        CreateRequest::Seed { seed } => seed_helix(&seed)
            .ok_or_else(|| ApiError::unprocessable("unknown_seed", format!("unknown seed {seed:?}")))??,
        CreateRequest::Explicit { surface, thread, d } => {
            if let Some(d) = d.filter(|&d| d != HELIX_D) {
                return Err(HelixError::UnsupportedType(d).into());
            }
            let c = Collection::new(surface, thread).map_err(HelixError::from)?;
            Helix64::new(c)?
        }
    };
    h.require_geometric()?;
    Ok(h)
}

async fn create_session(
    State(state): State<AppState>,
    body: Result<Json<CreateRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<StateView>), ApiError> {
    let Json(req) = body?;
    let helix = helix_from_request(req)?;
    let session = Session { id: uuid::Uuid::new_v4().to_string(), helix, history: Vec::new() };
    let out = view(&session)?;
    state.persist(&session).await?;
    state.insert(session);
    Ok((StatusCode::CREATED, Json(out)))
}

async fn get_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<StateView>, ApiError> {
    let entry = state.get(&id)?;
    let session = entry.read().await;
    Ok(Json(view(&session)?))
}

#[derive(Debug, Deserialize)]
pub struct TiltRequest {
    pub vertex: usize,
    #[serde(default = "default_side")]
    pub direction: Side,
}

fn default_side() -> Side {
    Side::Left
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CrossCheckView {
    pub verdict: String,
    pub vertex: usize,
    pub psi: Vec<usize>,
    pub tilted: BMatrix64,
    pub mutated: BMatrix64,
}

impl From<&CrossCheckReport<i64>> for CrossCheckView {
    fn from(r: &CrossCheckReport<i64>) -> Self {
        CrossCheckView {
            verdict: r.verdict().to_string(),
            vertex: r.vertex,
            psi: r.psi.clone(),
            tilted: r.tilted.clone(),
            mutated: r.mutated.clone(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TiltView {
    #[serde(flatten)]
    pub state: StateView,
    pub cross_check: CrossCheckView,
}

async fn tilt_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<TiltRequest>, JsonRejection>,
) -> Result<Json<TiltView>, ApiError> {
    let Json(req) = body?;
    let entry = state.get(&id)?;
    let mut session = entry.write().await;
    let current = session.helix.clone();
    let report = tokio::task::spawn_blocking(move || cross_check_tilt(&current, req.vertex, req.direction))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))??;
    if !report.matches {
        return Err(ApiError::unprocessable(
            "cross_check_mismatch",
            format!("tilt at {} disagrees with matrix mutation on {}", req.vertex, session.helix.thread()),
        ));
    }
    let next = report.helix.clone().ok_or_else(|| ApiError::Internal("missing tilted helix".into()))?;
    let previous = std::mem::replace(&mut session.helix, next);
    session.history.push((previous, Move { vertex: req.vertex, direction: req.direction }));
    state.persist(&session).await?;
    Ok(Json(TiltView { state: view(&session)?, cross_check: (&report).into() }))
}

async fn undo_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<StateView>, ApiError> {
    let entry = state.get(&id)?;
    let mut session = entry.write().await;
    let (previous, _) = session
        .history
        .pop()
        .ok_or_else(|| ApiError::unprocessable("empty_history", "nothing to undo"))?;
    session.helix = previous;
    state.persist(&session).await?;
    Ok(Json(view(&session)?))
}

#[derive(Debug, Deserialize)]
pub struct HeightQuery {
    pub vertex: usize,
    pub bound: Option<i64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HeightView {
    pub vertex: usize,
    pub bound: i64,
    pub labels: Vec<String>,
    /// Height functions on the base thread with values in `[-bound, bound]`.
    pub functions: Vec<Vec<i64>>,
    /// The levelling used for tilting at this vertex, if one exists.
    pub tilting: Option<Levelling>,
}

async fn height(
    State(state): State<AppState>,
    Path(id): Path<String>,
    query: Result<Query<HeightQuery>, QueryRejection>,
) -> Result<Json<HeightView>, ApiError> {
    let Query(q) = query?;
    let bound = q.bound.unwrap_or(DEFAULT_HEIGHT_BOUND);
    if !(0..=MAX_HEIGHT_BOUND).contains(&bound) {
        return Err(ApiError::unprocessable("bad_bound", format!("bound must lie in 0..={MAX_HEIGHT_BOUND}")));
    }
    let entry = state.get(&id)?;
    let session = entry.read().await;
    let h = &session.helix;
    let functions = enumerate_height_functions(h.thread(), q.vertex, bound)?;
    let tilting = build_height_function(h, q.vertex).ok().map(|hf| hf.levelling);
    Ok(Json(HeightView { vertex: q.vertex, bound, labels: h.thread().labels(), functions, tilting }))
}

#[derive(Debug, Deserialize)]
pub struct WebQuery {
    pub depth: Option<usize>,
}

async fn web(
    State(state): State<AppState>,
    Path(id): Path<String>,
    query: Result<Query<WebQuery>, QueryRejection>,
) -> Result<Json<WebGraph64>, ApiError> {
    let Query(q) = query?;
    let depth = q.depth.unwrap_or(2);
    if depth > MAX_WEB_DEPTH {
        return Err(ApiError::unprocessable("depth_too_large", format!("depth must be at most {MAX_WEB_DEPTH}")));
    }
    let entry = state.get(&id)?;
    let helix = entry.read().await.helix.clone();
    let graph = tokio::task::spawn_blocking(move || web_bfs(&helix, depth))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok(Json(graph))
}

async fn healthz() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/tilt", post(tilt_session))
        .route("/sessions/{id}/undo", post(undo_session))
        .route("/sessions/{id}/height", get(height))
        .route("/sessions/{id}/web", get(web))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

/// Binds `addr` and serves until the process exits.
pub async fn serve(addr: SocketAddr, snapshot_dir: Option<PathBuf>) -> std::io::Result<()> {
    let state = AppState::new(snapshot_dir);
    state.load_snapshots()?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}
