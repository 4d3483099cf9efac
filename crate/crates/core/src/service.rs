//! JSON-over-HTTP facade used by the web UI.
//!
//! * `GET /api/languages`: configured display names, in config order
//! * `POST /api/search`: run a search, return ranked candidates
//! * `GET /healthz`: status, version and backend kind

use crate::search::{CandidateProfile, ExpertFinder, SearchError};
use crate::sources::SourceError;
use axum::body::Bytes;
use axum::extract::State;
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::sync::Arc;
use std::time::{Duration, Instant};
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

pub const MAX_COUNT: usize = 100;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub vector_size: usize,
    /// Upper bound on one search request.
    pub timeout: Duration,
    /// Allowed UI origin; any origin when `None`.
    pub cors_origin: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            vector_size: crate::textpipe::DEFAULT_VECTOR_SIZE,
            timeout: Duration::from_secs(300),
            cors_origin: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRequest {
    pub language: String,
    #[serde(default)]
    pub search_count: Option<usize>,
    #[serde(default)]
    pub timeline_count: Option<usize>,
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub rank: usize,
    pub handle: String,
    pub display_name: String,
    pub bytes_of_code: u64,
    pub github_followers: u64,
    pub twitter_followers: u64,
    pub cosine: f64,
    pub mentions_percent: u8,
    pub microblog_profile_url: String,
    pub codehost_profile_url: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResponse {
    pub language: String,
    pub elapsed_ms: u64,
    pub results: Vec<ResultRow>,
}

impl SearchResponse {
    /// Project already-ranked candidates; order is preserved.
    pub fn new(language: &str, elapsed: Duration, ranked: &[CandidateProfile]) -> Self {
        let results = ranked
            .iter()
            .enumerate()
            .map(|(i, c)| ResultRow {
                rank: i + 1,
                handle: c.handle.clone(),
                display_name: c.display_name.clone(),
                bytes_of_code: c.bytes_of_code,
                github_followers: c.github_followers,
                twitter_followers: c.twitter_followers,
                cosine: c.cosine.value(),
                mentions_percent: c.mentions_percent(),
                microblog_profile_url: c.microblog_profile_url.clone(),
                codehost_profile_url: c.codehost_profile_url.clone(),
            })
            .collect();
        SearchResponse { language: language.to_string(), elapsed_ms: elapsed.as_millis() as u64, results }
    }
}

struct AppState {
    finder: Arc<ExpertFinder>,
    config: ServiceConfig,
}

struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, message: message.into() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

impl From<SearchError> for ApiError {
    fn from(e: SearchError) -> Self {
        let status = match &e {
            SearchError::InvalidArgument(_) => StatusCode::BAD_REQUEST,
            _ if matches!(e.source_error(), Some(SourceError::RateLimited { .. })) => StatusCode::TOO_MANY_REQUESTS,
            _ => StatusCode::BAD_GATEWAY,
        };
        ApiError::new(status, e.to_string())
    }
}

pub fn router(finder: Arc<ExpertFinder>, config: ServiceConfig) -> Router {
    let origin = match config.cors_origin.as_deref().map(HeaderValue::from_str) {
        Some(Ok(origin)) => AllowOrigin::exact(origin),
        Some(Err(_)) => {
            tracing::warn!("ignoring invalid CORS origin, allowing any");
            AllowOrigin::any()
        }
        None => AllowOrigin::any(),
    };
    let cors = CorsLayer::new().allow_origin(origin).allow_methods(Any).allow_headers(Any);
    let state = Arc::new(AppState { finder, config });
    Router::new()
        .route("/api/languages", get(languages))
        .route("/api/search", post(search))
        .route("/healthz", get(healthz))
        .layer(cors)
        .with_state(state)
}

async fn languages(State(state): State<Arc<AppState>>) -> Json<Vec<String>> {
    Json(state.finder.languages().display_names().into_iter().map(String::from).collect())
}

async fn healthz(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    Json(json!({
        "status": "ok",
        "version": env!("CARGO_PKG_VERSION"),
        "backend": state.finder.sources().kind.to_string(),
    }))
}

fn count_in_range(name: &str, value: Option<usize>, default: usize) -> Result<usize, ApiError> {
    let v = value.unwrap_or(default);
    if (1..=MAX_COUNT).contains(&v) {
        Ok(v)
    } else {
        Err(ApiError::new(StatusCode::BAD_REQUEST, format!("{name} must be between 1 and {MAX_COUNT}")))
    }
}

async fn search(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Json<SearchResponse>, ApiError> {
    let req: SearchRequest = serde_json::from_slice(&body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("invalid request body: {e}")))?;
    let params = state
        .finder
        .params_for(&req.language)?
        .with_counts(
            count_in_range("search_count", req.search_count, crate::search::DEFAULT_SEARCH_COUNT)?,
            count_in_range("timeline_count", req.timeline_count, crate::search::DEFAULT_TIMELINE_COUNT)?,
        )
        .with_vector_size(state.config.vector_size);

    let started = Instant::now();
    let finder = state.finder.clone();
    let language = params.language.display_name.clone();
    let task = tokio::task::spawn_blocking(move || finder.find_experts(&params));
    let ranked = match tokio::time::timeout(state.config.timeout, task).await {
        Err(_) => return Err(ApiError::new(StatusCode::GATEWAY_TIMEOUT, "search timed out")),
        Ok(Err(join)) => return Err(ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, join.to_string())),
        Ok(Ok(result)) => result?,
    };
    Ok(Json(SearchResponse::new(&language, started.elapsed(), &ranked)))
}
