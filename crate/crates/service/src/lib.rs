//! HTTP API for interactive Zeckendorf games and analysis.
//!
//! | method | path                      | body / query                       |
//! |--------|---------------------------|------------------------------------|
//! | POST   | `/games`                  | [`CreateGame`]                     |
//! | GET    | `/games/{id}`             |                                    |
//! | POST   | `/games/{id}/moves`       | [`PostMove`]                       |
//! | GET    | `/analysis/solve`         | `n`                                |
//! | GET    | `/analysis/bounds`        | `n`                                |
//! | GET    | `/analysis/simulate`      | `n`, `trials` (9999), `seed` (0)   |
//! | GET    | `/analysis/tree`          | `n`, `format` (`dot` or `json`)    |
//!
//! Errors are JSON objects `{"error": <code>, "message": <text>}`, plus
//! `"limit"` for capacity refusals.

pub mod session;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::cors::CorsLayer;
use zeckgame::{bounds_report, GameError, Solver, SolverConfig, TreeFormat};

use session::SessionError;
pub use session::{
    CreateGame, GameSession, HistoryEntry, Mode, PostMove, Seat, SessionView, Status,
};

pub const DEFAULT_ADDR: &str = "127.0.0.1:8080";
pub const ADDR_ENV: &str = "ZECKGAME_ADDR";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub addr: SocketAddr,
    pub solver: SolverConfig,
    /// Upper limit for `trials` on `/analysis/simulate`.
    pub max_trials: u64,
    /// Upper limit for `n` on `/analysis/simulate`.
    pub max_sim_n: u32,
    /// Sessions are loaded from and saved to this file when set.
    pub snapshot: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            addr: DEFAULT_ADDR.parse().unwrap(),
            solver: SolverConfig::default(),
            max_trials: 100_000,
            max_sim_n: 2_000,
            snapshot: None,
        }
    }
}

/// In-memory sessions. Each session has its own lock so mutations of one
/// game are serialized while other games proceed.
#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<GameSession>>>>,
}

impl SessionStore {
    pub fn insert(&self, session: GameSession) {
        let id = session.id.clone();
        self.sessions
            .write()
            .unwrap()
            .insert(id, Arc::new(Mutex::new(session)));
    }

    pub fn get(&self, id: &str) -> Option<Arc<Mutex<GameSession>>> {
        self.sessions.read().unwrap().get(id).cloned()
    }

    pub fn len(&self) -> usize {
        self.sessions.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every session, ordered by id.
    pub fn snapshot(&self) -> Vec<GameSession> {
        let map = self.sessions.read().unwrap();
        let mut all: Vec<GameSession> = map.values().map(|s| s.lock().unwrap().clone()).collect();
        all.sort_by(|a, b| a.id.cmp(&b.id));
        all
    }

    pub fn save(&self, path: &std::path::Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(&self.snapshot())?;
        std::fs::write(path, text)
    }

    /// Loads sessions saved by [`SessionStore::save`], dropping any whose
    /// history does not replay.
    pub fn load(&self, path: &std::path::Path) -> std::io::Result<usize> {
        let text = std::fs::read_to_string(path)?;
        let sessions: Vec<GameSession> = serde_json::from_str(&text)?;
        let mut loaded = 0;
        for s in sessions {
            match s.verify() {
                Ok(()) => {
                    self.insert(s);
                    loaded += 1;
                }
                Err(e) => tracing::warn!(id = %s.id, "dropping snapshot session: {e}"),
            }
        }
        Ok(loaded)
    }
}

#[derive(Debug, Clone)]
pub struct AppState {
    pub config: Arc<ServiceConfig>,
    pub store: Arc<SessionStore>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        AppState {
            config: Arc::new(config),
            store: Arc::new(SessionStore::default()),
        }
    }
}

#[derive(Debug)]
pub enum ApiError {
    NotFound(String),
    Validation(String),
    Conflict(String),
    IllegalMove(String),
    Capacity { message: String, limit: u64 },
    Internal(String),
}

impl From<GameError> for ApiError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::Capacity { limit, .. } => ApiError::Capacity {
                message: e.to_string(),
                limit: limit.into(),
            },
            GameError::IllegalMove { .. } => ApiError::IllegalMove(e.to_string()),
            GameError::Terminal(_) | GameError::NoMoves(_) => ApiError::Conflict(e.to_string()),
            other => ApiError::Validation(other.to_string()),
        }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::Validation(m) => ApiError::Validation(m),
            SessionError::Conflict(m) => ApiError::Conflict(m),
            SessionError::Rule(g) => g.into(),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::Validation(e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::Validation(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::NotFound(m) => (
                StatusCode::NOT_FOUND,
                json!({"error": "not_found", "message": m}),
            ),
            ApiError::Validation(m) => (
                StatusCode::BAD_REQUEST,
                json!({"error": "validation", "message": m}),
            ),
            ApiError::Conflict(m) => (
                StatusCode::CONFLICT,
                json!({"error": "conflict", "message": m}),
            ),
            ApiError::IllegalMove(m) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({"error": "illegal_move", "message": m}),
            ),
            ApiError::Capacity { message, limit } => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({"error": "capacity", "message": message, "limit": limit}),
            ),
            ApiError::Internal(m) => (
                StatusCode::INTERNAL_SERVER_ERROR,
                json!({"error": "internal", "message": m}),
            ),
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/games", post(create_game))
        .route("/games/{id}", get(get_game))
        .route("/games/{id}/moves", post(post_move))
        .route("/analysis/solve", get(solve))
        .route("/analysis/bounds", get(bounds))
        .route("/analysis/simulate", get(simulate))
        .route("/analysis/tree", get(tree))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

async fn create_game(
    State(app): State<AppState>,
    body: Result<Json<CreateGame>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let Json(req) = body?;
    let session = GameSession::create(uuid::Uuid::new_v4().to_string(), &req)?;
    let view = session.view();
    app.store.insert(session);
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_game(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<SessionView>> {
    let session = app
        .store
        .get(&id)
        .ok_or_else(|| ApiError::NotFound(format!("no game `{id}`")))?;
    let view = session.lock().unwrap().view();
    Ok(Json(view))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MoveResponse {
    /// The posted move followed by the engine's reply, if any.
    pub applied: Vec<HistoryEntry>,
    pub game: SessionView,
}

async fn post_move(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<PostMove>, JsonRejection>,
) -> ApiResult<Json<MoveResponse>> {
    let Json(req) = body?;
    let session = app
        .store
        .get(&id)
        .ok_or_else(|| ApiError::NotFound(format!("no game `{id}`")))?;
    let mut guard = session.lock().unwrap();
    let applied = guard.play(&req)?;
    Ok(Json(MoveResponse {
        applied,
        game: guard.view(),
    }))
}

#[derive(Debug, Deserialize)]
struct NQuery {
    n: u32,
}

#[derive(Debug, Deserialize)]
struct SimQuery {
    n: u32,
    #[serde(default = "default_trials")]
    trials: u64,
    #[serde(default)]
    seed: u64,
}

fn default_trials() -> u64 {
    zeckgame::sim::DEFAULT_TRIALS
}

#[derive(Debug, Deserialize)]
struct TreeQuery {
    n: u32,
    #[serde(default = "default_format")]
    format: TreeFormat,
}

fn default_format() -> TreeFormat {
    TreeFormat::Dot
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> ApiResult<T> + Send + 'static,
) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?
}

async fn solve(
    State(app): State<AppState>,
    q: Result<Query<NQuery>, QueryRejection>,
) -> ApiResult<Json<zeckgame::SolveReport>> {
    let Query(q) = q?;
    let solver = Solver::new(app.config.solver);
    blocking(move || Ok(Json(solver.solve(q.n)?))).await
}

async fn bounds(
    q: Result<Query<NQuery>, QueryRejection>,
) -> ApiResult<Json<zeckgame::BoundsReport>> {
    let Query(q) = q?;
    Ok(Json(bounds_report(q.n)?))
}

async fn simulate(
    State(app): State<AppState>,
    q: Result<Query<SimQuery>, QueryRejection>,
) -> ApiResult<Json<zeckgame::SimStats>> {
    let Query(q) = q?;
    if q.trials > app.config.max_trials {
        return Err(ApiError::Capacity {
            message: format!(
                "trials={} exceeds the limit of {}",
                q.trials, app.config.max_trials
            ),
            limit: app.config.max_trials,
        });
    }
    if q.n > app.config.max_sim_n {
        return Err(ApiError::Capacity {
            message: format!(
                "n={} exceeds the simulate limit of {}",
                q.n, app.config.max_sim_n
            ),
            limit: app.config.max_sim_n.into(),
        });
    }
    blocking(move || Ok(Json(zeckgame::simulate(q.n, q.trials, q.seed)?))).await
}

async fn tree(
    State(app): State<AppState>,
    q: Result<Query<TreeQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let Query(q) = q?;
    let solver = Solver::new(app.config.solver);
    let text = blocking(move || Ok(solver.export_tree(q.n, q.format)?)).await?;
    let content_type = match q.format {
        TreeFormat::Dot => "text/vnd.graphviz; charset=utf-8",
        TreeFormat::Json => "application/json",
    };
    Ok(([(header::CONTENT_TYPE, content_type)], text).into_response())
}

/// Runs the service until Ctrl-C, then writes the snapshot file if one is
/// configured.
pub async fn serve(config: ServiceConfig) -> std::io::Result<()> {
    let app = AppState::new(config.clone());
    if let Some(path) = &config.snapshot {
        if path.exists() {
            let n = app.store.load(path)?;
            tracing::info!("restored {n} sessions from {}", path.display());
        }
    }
    let listener = tokio::net::TcpListener::bind(config.addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(app.clone()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    if let Some(path) = &config.snapshot {
        app.store.save(path)?;
        tracing::info!("saved {} sessions to {}", app.store.len(), path.display());
    }
    Ok(())
}
