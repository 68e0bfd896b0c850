//! HTTP/JSON front end for the dictionary game.

use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tower_http::services::ServeDir;

use lexikernel::error::Error;
use lexikernel::game::{GameRules, SessionStore};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct ApiError(Error);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match &self.0 {
            Error::Rule { rule, detail } => (
                StatusCode::CONFLICT,
                json!({ "rule": rule.as_str(), "detail": detail }),
            ),
            Error::NotComplete { .. } => (
                StatusCode::CONFLICT,
                json!({ "rule": "not_complete", "detail": self.0.to_string() }),
            ),
            Error::SessionNotFound(_) => (StatusCode::NOT_FOUND, json!({ "error": self.0.to_string() })),
            Error::Precondition(_) => (StatusCode::BAD_REQUEST, json!({ "error": self.0.to_string() })),
            _ => (
                StatusCode::INTERNAL_SERVER_ERROR,
                json!({ "error": self.0.to_string() }),
            ),
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Deserialize)]
struct StartRequest {
    start_word: String,
    #[serde(default)]
    rules: GameRules,
}

#[derive(Deserialize)]
struct DefinitionRequest {
    word: String,
    tokens: Vec<String>,
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "version": VERSION }))
}

async fn create(State(store): State<Arc<SessionStore>>, Json(req): Json<StartRequest>) -> ApiResult<Response> {
    let view = store.create(&req.start_word, req.rules)?;
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

async fn show(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(Json(store.view(&id)?).into_response())
}

async fn define(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
    Json(req): Json<DefinitionRequest>,
) -> ApiResult<Response> {
    Ok(Json(store.submit(&id, &req.word, &req.tokens)?).into_response())
}

async fn export(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult<Response> {
    let lex = store.export(&id)?;
    Ok((
        [(header::CONTENT_TYPE, "application/x-ndjson; charset=utf-8")],
        lex.to_jsonl_string(),
    )
        .into_response())
}

async fn analysis(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult<Response> {
    let session = store.snapshot(&id)?;
    let result = tokio::task::spawn_blocking(move || session.analyze())
        .await
        .map_err(|e| Error::Invariant(format!("analysis task failed: {e}")))??;
    Ok(Json(result).into_response())
}

/// The game API, plus static files from `ui_dir` for any other path.
pub fn router(store: Arc<SessionStore>, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show))
        .route("/sessions/{id}/definitions", post(define))
        .route("/sessions/{id}/export", get(export))
        .route("/sessions/{id}/analysis", get(analysis))
        .with_state(store);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}

/// Serves until interrupted, then flushes every session log.
pub async fn serve(listener: tokio::net::TcpListener, store: Arc<SessionStore>, ui_dir: Option<PathBuf>) -> std::io::Result<()> {
    let app = router(store.clone(), ui_dir);
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown_signal())
        .await?;
    store.flush().map_err(std::io::Error::other)
}
