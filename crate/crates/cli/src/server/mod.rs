//! HTTP API and per-session event streams.

mod actor;
mod error;

use std::collections::{HashMap, VecDeque};
use std::convert::Infallible;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use colav_core::scenario::ScenarioDocument;
use colav_core::{Characteristic, Scenario, Session, SessionSnapshot, SimConfig, TraceEntry, Verdict};
use futures::Stream;
use serde::Deserialize;
use tokio::sync::broadcast::error::RecvError;

pub use actor::{PlaybackAction, SessionHandle, Subscription};
pub use error::ApiError;

/// Shared server state: the scenario catalog, the base configuration for
/// new sessions and the live sessions.
pub struct AppState {
    config: SimConfig,
    scenarios: Vec<Scenario>,
    sessions: Mutex<HashMap<String, SessionHandle>>,
    next_id: AtomicU64,
}

impl AppState {
    pub fn new(config: SimConfig, scenarios: Vec<Scenario>) -> Arc<Self> {
        Arc::new(Self {
            config,
            scenarios,
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        })
    }

    fn tick_period(&self) -> Duration {
        Duration::from_secs_f64(self.config.session.tick / self.config.server.playback_rate)
    }

    fn session(&self, id: &str) -> Result<SessionHandle, ApiError> {
        self.sessions
            .lock()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("no session `{id}`")))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/scenarios", get(list_scenarios))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", get(get_session))
        .route("/api/sessions/{id}/playback", post(playback))
        .route("/api/sessions/{id}/decision", post(decision))
        .route("/api/sessions/{id}/foil", post(foil))
        .route("/api/sessions/{id}/events", get(events))
        .with_state(state)
}

async fn list_scenarios(State(state): State<Arc<AppState>>) -> Json<Vec<ScenarioDocument>> {
    Json(state.scenarios.iter().map(|s| s.document().clone()).collect())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    scenario_id: String,
    characteristic: Option<Characteristic>,
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> Result<impl IntoResponse, ApiError> {
    let Json(req) = body?;
    let mut scenario = state
        .scenarios
        .iter()
        .find(|s| s.id == req.scenario_id)
        .cloned()
        .ok_or_else(|| ApiError::not_found(format!("no scenario `{}`", req.scenario_id)))?;
    if let Some(c) = req.characteristic {
        // rebuild from the document so the trace header records the override
        let mut doc = scenario.document().clone();
        doc.foil_characteristic = c;
        scenario = Scenario::from_document(doc, state.config.vessel.max_speed)?;
    }
    let id = format!("s{}", state.next_id.fetch_add(1, Ordering::Relaxed));
    let config = state.config.clone();
    let sid = id.clone();
    // the decision-point probe runs up front and is CPU bound
    let session = tokio::task::spawn_blocking(move || Session::create(sid, scenario, config))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    let snapshot = session.snapshot();
    let handle = SessionHandle::spawn(session, state.tick_period());
    state.sessions.lock().expect("session map lock").insert(id.clone(), handle);
    tracing::info!(session = id, scenario = req.scenario_id, "session created");
    Ok((StatusCode::CREATED, Json(snapshot)))
}

async fn get_session(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<SessionSnapshot>, ApiError> {
    Ok(Json(state.session(&id)?.snapshot().await?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlaybackRequest {
    action: String,
    time: Option<f64>,
}

async fn playback(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<PlaybackRequest>, JsonRejection>,
) -> Result<Json<SessionSnapshot>, ApiError> {
    let Json(req) = body?;
    let action = match (req.action.as_str(), req.time) {
        ("play", _) => PlaybackAction::Play,
        ("pause", _) => PlaybackAction::Pause,
        ("seek", Some(t)) => PlaybackAction::Seek(t),
        ("seek", None) => return Err(ApiError::bad_request("seek needs `time`")),
        (other, _) => {
            return Err(ApiError::bad_request(format!(
                "unknown action `{other}` (expected play|pause|seek)"
            )))
        }
    };
    Ok(Json(state.session(&id)?.playback(action).await?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DecisionRequest {
    verdict: String,
}

async fn decision(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<DecisionRequest>, JsonRejection>,
) -> Result<Json<SessionSnapshot>, ApiError> {
    let Json(req) = body?;
    let verdict: Verdict = req.verdict.parse().map_err(ApiError::bad_request)?;
    Ok(Json(state.session(&id)?.decide(verdict).await?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FoilRequest {
    characteristic: String,
}

async fn foil(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<FoilRequest>, JsonRejection>,
) -> Result<Json<SessionSnapshot>, ApiError> {
    let Json(req) = body?;
    let c: Characteristic = req.characteristic.parse().map_err(ApiError::bad_request)?;
    Ok(Json(state.session(&id)?.set_foil(c).await?))
}

#[derive(Deserialize)]
struct EventsQuery {
    from: Option<u64>,
}

/// Server-sent events. Each message is named after the record kind, has the
/// sequence number as its id and the full trace entry as JSON data. Records
/// with seq greater than `from` (or `Last-Event-ID`) are replayed first.
async fn events(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(query): Query<EventsQuery>,
    headers: HeaderMap,
) -> Result<Sse<impl Stream<Item = Result<Event, Infallible>>>, ApiError> {
    let handle = state.session(&id)?;
    let resume = headers
        .get("last-event-id")
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.trim().parse::<u64>().ok());
    let after = resume.or(query.from).unwrap_or(0);
    let sub = handle.subscribe(after).await?;
    let stream = entry_stream(handle, sub, after);
    let stream = futures::StreamExt::map(stream, |e| Ok(to_event(&e)));
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}

pub fn to_event(e: &TraceEntry) -> Event {
    let data = serde_json::to_string(e).expect("trace records serialize");
    Event::default()
        .event(e.record.event_name())
        .id(e.seq.to_string())
        .data(data)
}

struct Cursor {
    handle: SessionHandle,
    backlog: VecDeque<TraceEntry>,
    live: tokio::sync::broadcast::Receiver<TraceEntry>,
    last: u64,
}

/// Backlog first, then live records. A subscriber that falls behind the
/// broadcast buffer re-reads the gap from the session.
pub fn entry_stream(handle: SessionHandle, sub: Subscription, after: u64) -> impl Stream<Item = TraceEntry> {
    let cursor = Cursor {
        handle,
        backlog: sub.backlog.into(),
        live: sub.live,
        last: after,
    };
    futures::stream::unfold(cursor, |mut c| async move {
        loop {
            if let Some(e) = c.backlog.pop_front() {
                c.last = e.seq;
                return Some((e, c));
            }
            match c.live.recv().await {
                Ok(e) if e.seq <= c.last => continue,
                Ok(e) => {
                    c.last = e.seq;
                    return Some((e, c));
                }
                Err(RecvError::Lagged(_)) => {
                    let sub = c.handle.subscribe(c.last).await.ok()?;
                    c.backlog = sub.backlog.into();
                    c.live = sub.live;
                }
                Err(RecvError::Closed) => return None,
            }
        }
    })
}
