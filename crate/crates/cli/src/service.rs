//! HTTP front end: `POST /solve` with an instance file as the body, `GET /health`.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use mfscp_core::format::parse_with;
use mfscp_core::Overrides;
use serde::{Deserialize, Serialize};
use tokio::sync::Semaphore;

use crate::commands::FormatArg;
use crate::run::{run_solve, SolveConfig, SolveReport, SCHEMA_VERSION};

/// Largest accepted number of nonzeros.
pub const DEFAULT_MAX_NNZ: usize = 3_000_000;
pub const MAX_TRIALS: usize = 10;
/// Room for a capped instance written with long indices and costs.
pub const DEFAULT_MAX_BODY: usize = 64 * 1024 * 1024;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub max_nnz: usize,
    pub max_concurrent: usize,
    pub max_body: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            max_nnz: DEFAULT_MAX_NNZ,
            max_concurrent: std::thread::available_parallelism().map_or(1, |n| n.get()),
            max_body: DEFAULT_MAX_BODY,
        }
    }
}

struct AppState {
    config: ServiceConfig,
    permits: Semaphore,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct SolveQuery {
    pub format: String,
    pub trials: usize,
    pub seed: u64,
    /// Include the 1-based column list.
    pub columns: bool,
}

impl Default for SolveQuery {
    fn default() -> Self {
        Self {
            format: "auto".into(),
            trials: 1,
            seed: 0,
            columns: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub schema: u32,
    pub error: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<usize>,
}

fn error(status: StatusCode, kind: &str, message: String, limit: Option<usize>) -> Response {
    let body = ErrorBody {
        schema: SCHEMA_VERSION,
        error: kind.to_string(),
        message,
        limit,
    };
    (status, Json(body)).into_response()
}

pub fn router(config: ServiceConfig) -> Router {
    let max_body = config.max_body;
    let state = Arc::new(AppState {
        permits: Semaphore::new(config.max_concurrent.max(1)),
        config,
    });
    Router::new()
        .route("/solve", post(handle_solve))
        .route("/health", get(handle_health))
        .layer(DefaultBodyLimit::max(max_body))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(config)).await
}

async fn handle_health(State(state): State<Arc<AppState>>) -> Response {
    Json(serde_json::json!({
        "schema": SCHEMA_VERSION,
        "status": "ok",
        "name": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "max_nnz": state.config.max_nnz,
        "max_trials": MAX_TRIALS,
    }))
    .into_response()
}

async fn handle_solve(
    State(state): State<Arc<AppState>>,
    Query(query): Query<SolveQuery>,
    body: Bytes,
) -> Response {
    let format = match query.format.as_str() {
        "row" => FormatArg::Row,
        "col" => FormatArg::Col,
        "auto" => FormatArg::Auto,
        other => {
            return error(
                StatusCode::BAD_REQUEST,
                "bad_request",
                format!("format must be row, col or auto, got {other:?}"),
                None,
            )
        }
    };
    if query.trials == 0 || query.trials > MAX_TRIALS {
        return error(
            StatusCode::BAD_REQUEST,
            "bad_request",
            format!("trials must lie in 1..={MAX_TRIALS}"),
            None,
        );
    }

    let Ok(_permit) = state.permits.acquire().await else {
        return error(StatusCode::SERVICE_UNAVAILABLE, "shutdown", "service closing".into(), None);
    };
    let max_nnz = state.config.max_nnz;
    let job = tokio::task::spawn_blocking(move || solve_body(&body, format, &query, max_nnz));
    match job.await {
        Ok(response) => response,
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string(), None),
    }
}

fn solve_body(body: &[u8], format: FormatArg, query: &SolveQuery, max_nnz: usize) -> Response {
    let detected = match parse_with(body, format.kind()) {
        Ok(d) => d,
        Err(e) => return error(StatusCode::BAD_REQUEST, "parse", e.to_string(), None),
    };
    let instance = &detected.instance;
    if instance.nnz() > max_nnz {
        return error(
            StatusCode::PAYLOAD_TOO_LARGE,
            "size_cap",
            format!("instance has {} nonzeros, limit is {max_nnz}", instance.nnz()),
            Some(max_nnz),
        );
    }
    let config = SolveConfig {
        trials: query.trials,
        seed: query.seed,
        overrides: Overrides::default(),
        repair: false,
    };
    let run = match run_solve(instance, &config) {
        Ok(run) => run,
        Err(e) => return error(StatusCode::INTERNAL_SERVER_ERROR, "solver", e.to_string(), None),
    };
    if run.solution.exhausted {
        return error(
            StatusCode::INTERNAL_SERVER_ERROR,
            "exhausted",
            "iteration caps reached before the solver saturated".into(),
            None,
        );
    }
    let report = SolveReport::new(instance, detected.kind, &config, &run, query.columns, true);
    Json(report).into_response()
}
