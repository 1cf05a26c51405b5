//! HTTP facade over the engine and simulator: click-to-collect reference
//! points, segmentation with verdict feedback, and a live tracked walk
//! streamed as server-sent events.

mod session;
mod walk;

use std::convert::Infallible;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use fingerzone_core::{Error, Point, Rect, SegmentationParams};
use futures::Stream;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

pub use session::Session;
pub use walk::{StepEvent, WalkFeed, WalkSummary};

#[derive(Clone)]
pub struct AppState {
    session: Arc<Mutex<Session>>,
    cadence: Duration,
}

impl AppState {
    pub fn new(session: Session, cadence: Duration) -> Self {
        AppState {
            session: Arc::new(Mutex::new(session)),
            cadence,
        }
    }

    pub fn lock(&self) -> MutexGuard<'_, Session> {
        self.session.lock().unwrap_or_else(|e| e.into_inner())
    }
}

/// Error body `{"error": ...}` with a status code.
#[derive(Debug)]
pub struct ApiError(StatusCode, String);

impl ApiError {
    fn bad_request(msg: impl Into<String>) -> Self {
        ApiError(StatusCode::BAD_REQUEST, msg.into())
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Conflict(_) | Error::Stale(_) => StatusCode::CONFLICT,
            Error::InvalidInput(_) | Error::NoOverlap | Error::Unlocatable => StatusCode::UNPROCESSABLE_ENTITY,
            Error::Parse { .. } | Error::Version { .. } => StatusCode::BAD_REQUEST,
            Error::Numerical(_) | Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed request: {e}")))
}

fn parse_rect(raw: [f64; 4]) -> Result<Rect, ApiError> {
    Rect::new(raw[0], raw[1], raw[2], raw[3]).map_err(|e| ApiError::bad_request(e.to_string()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CollectBody {
    x: f64,
    y: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckBody {
    rect: [f64; 4],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CommitBody {
    rect: [f64; 4],
    revision: u64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct AutoBody {
    #[serde(default)]
    params: Option<SegmentationParams>,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct WalkBody {
    #[serde(default)]
    waypoints: Option<Vec<Point>>,
    #[serde(default)]
    step: Option<f64>,
}

#[derive(Deserialize, Default)]
struct StreamQuery {
    #[serde(default)]
    debug: bool,
}

async fn floorplan(State(app): State<AppState>) -> ApiResult {
    Ok(Json(app.lock().render()))
}

async fn collect(State(app): State<AppState>, body: Bytes) -> ApiResult {
    let b: CollectBody = parse_body(&body)?;
    Ok(Json(app.lock().collect(Point::new(b.x, b.y))?))
}

async fn segment_check(State(app): State<AppState>, body: Bytes) -> ApiResult {
    let b: CheckBody = parse_body(&body)?;
    let rect = parse_rect(b.rect)?;
    Ok(Json(app.lock().check(&rect)))
}

async fn segment_commit(State(app): State<AppState>, body: Bytes) -> ApiResult {
    let b: CommitBody = parse_body(&body)?;
    let rect = parse_rect(b.rect)?;
    Ok(Json(app.lock().commit(&rect, b.revision)?))
}

async fn segment_auto(State(app): State<AppState>, body: Bytes) -> ApiResult {
    let b: AutoBody = if body.iter().all(u8::is_ascii_whitespace) { AutoBody::default() } else { parse_body(&body)? };
    if let Some(p) = &b.params {
        p.validate().map_err(|e| ApiError::bad_request(e.to_string()))?;
    }
    Ok(Json(app.lock().auto(b.params, b.seed)?))
}

async fn start_walk(State(app): State<AppState>, body: Bytes) -> ApiResult {
    let b: WalkBody = if body.iter().all(u8::is_ascii_whitespace) { WalkBody::default() } else { parse_body(&body)? };
    let (feed, plan) = app.lock().start_walk(b.waypoints, b.step.unwrap_or(1.0))?;
    let id = feed.id;
    let steps = plan.len();
    tokio::spawn(walk::run(feed, plan, app.cadence));
    Ok(Json(json!({ "walk_id": id, "steps": steps })))
}

async fn walk_stream(
    State(app): State<AppState>,
    Query(q): Query<StreamQuery>,
) -> Result<Sse<impl Stream<Item = Result<Event, Infallible>>>, ApiError> {
    let feed = app
        .lock()
        .latest_walk()
        .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, "no walk has been started".into()))?;
    Ok(Sse::new(walk::events(feed, q.debug)).keep_alive(KeepAlive::default()))
}

async fn database_save(State(app): State<AppState>) -> Response {
    let text = app.lock().database().to_json();
    ([(header::CONTENT_TYPE, "application/json")], text).into_response()
}

async fn database_load(State(app): State<AppState>, body: Bytes) -> ApiResult {
    let text = std::str::from_utf8(&body).map_err(|_| ApiError::bad_request("database must be UTF-8 text"))?;
    let db = fingerzone_core::load_database(text).map_err(|e| ApiError::bad_request(e.to_string()))?;
    Ok(Json(app.lock().load(db)?))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/floorplan", get(floorplan))
        .route("/api/collect", post(collect))
        .route("/api/segment/check", post(segment_check))
        .route("/api/segment/commit", post(segment_commit))
        .route("/api/segment/auto", post(segment_auto))
        .route("/api/walk", post(start_walk))
        .route("/api/walk/stream", get(walk_stream))
        .route("/api/database/save", post(database_save))
        .route("/api/database/load", post(database_load))
        .with_state(state)
}
