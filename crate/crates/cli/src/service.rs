//! HTTP session service.
//!
//! Each session holds a graph and the patches that produced it. Mutations
//! of one session are serialized by its lock; distinct sessions are
//! independent.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, MutexGuard};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use glc_core::format::{to_dot, to_json};
use glc_core::graph::Graph;
use glc_core::moves::{apply, Direction, MoveKind, Site};
use glc_core::rewrite::Patch;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::describe::{move_entries, resolve, MoveEntry};
use crate::{key_hex, load_graph, parse_direction, parse_move, parse_site, Error};

struct Applied {
    kind: MoveKind,
    direction: Direction,
    site: Site,
    patch: Patch,
}

struct Session {
    graph: Graph,
    history: Vec<Applied>,
    moves: Vec<MoveEntry>,
}

impl Session {
    fn new(graph: Graph) -> Self {
        let moves = move_entries(&graph);
        Session { graph, history: Vec::new(), moves }
    }

    fn refresh(&mut self) {
        self.moves = move_entries(&self.graph);
    }

    fn view(&self, id: &str) -> SessionView {
        SessionView {
            id: id.to_string(),
            graph: to_json(&self.graph),
            key: key_hex(&self.graph),
            moves: self.moves.clone(),
            history: self
                .history
                .iter()
                .map(|a| HistoryEntry {
                    move_kind: a.kind.to_string(),
                    direction: a.direction,
                    site: a.site.to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionView {
    pub id: String,
    pub graph: Value,
    /// Hex canonical key; equal for isomorphic graphs.
    pub key: String,
    pub moves: Vec<MoveEntry>,
    pub history: Vec<HistoryEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HistoryEntry {
    pub move_kind: String,
    pub direction: Direction,
    pub site: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateBody {
    term: Option<String>,
    glc: Option<String>,
    graph: Option<Value>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ApplyBody {
    move_kind: String,
    #[serde(default)]
    direction: Option<String>,
    #[serde(default)]
    descriptor: Option<String>,
    #[serde(default)]
    site: Option<String>,
}

#[derive(Default)]
pub struct AppState {
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    next: AtomicU64,
}

impl AppState {
    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, Error> {
        lock(&self.sessions).get(id).cloned().ok_or_else(|| Error::UnknownSession(id.to_string()))
    }
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|p| p.into_inner())
}

pub struct ApiError(pub Error);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.0.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(json!({ "code": self.0.code(), "message": self.0.to_string() }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router() -> Router {
    router_with(Arc::new(AppState::default()))
}

pub fn router_with(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show).delete(remove))
        .route("/sessions/{id}/moves", get(moves))
        .route("/sessions/{id}/apply", post(apply_move))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/dot", get(dot))
        .with_state(state)
}

/// Body: `{"term": ...}`, `{"glc": ...}`, `{"graph": <graph json>}`, or
/// plain text holding a term or a `.glc` document.
fn graph_from_body(body: &[u8]) -> Result<Graph, Error> {
    let text = std::str::from_utf8(body).map_err(|_| Error::BadRequest("body is not utf-8".into()))?;
    if !text.trim_start().starts_with('{') {
        return load_graph(text);
    }
    let b: CreateBody = serde_json::from_str(text).map_err(|e| Error::BadRequest(e.to_string()))?;
    match (b.term, b.glc, b.graph) {
        (Some(t), None, None) => Ok(glc_core::lambda::encode(&glc_core::lambda::parse(&t)?)),
        (None, Some(g), None) => Ok(glc_core::format::parse_glc(&g)?),
        (None, None, Some(v)) => Ok(glc_core::format::from_json(&v)?),
        _ => Err(Error::BadRequest("expected exactly one of term, glc, graph".into())),
    }
}

async fn create(State(st): State<Arc<AppState>>, body: Bytes) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let g = graph_from_body(&body)?;
    let id = format!("s{}", st.next.fetch_add(1, Ordering::Relaxed) + 1);
    let s = Session::new(g);
    let view = s.view(&id);
    lock(&st.sessions).insert(id, Arc::new(Mutex::new(s)));
    Ok((StatusCode::CREATED, Json(view)))
}

async fn show(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    let s = st.session(&id)?;
    let view = lock(&s).view(&id);
    Ok(Json(view))
}

async fn moves(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Vec<MoveEntry>>> {
    let s = st.session(&id)?;
    let m = lock(&s).moves.clone();
    Ok(Json(m))
}

async fn apply_move(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<SessionView>> {
    let s = st.session(&id)?;
    let b: ApplyBody = serde_json::from_slice(&body).map_err(|e| Error::BadRequest(e.to_string()))?;
    let kind = parse_move(&b.move_kind)?;
    let dir = b.direction.as_deref().map(parse_direction).transpose()?.unwrap_or(Direction::Forward);
    let mut s = lock(&s);
    let site = match (b.descriptor, b.site) {
        (Some(d), None) => resolve(&s.graph, &kind, dir, &d).ok_or(Error::StaleDescriptor(d))?,
        (None, Some(raw)) => parse_site(&raw)?,
        _ => return Err(Error::BadRequest("expected exactly one of descriptor, site".into()).into()),
    };
    let out = apply(&mut s.graph, &kind, &site, dir).map_err(Error::from)?;
    s.history.push(Applied { kind, direction: dir, site, patch: out.patch });
    s.refresh();
    Ok(Json(s.view(&id)))
}

async fn undo(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    let s = st.session(&id)?;
    let mut s = lock(&s);
    let last = s.history.pop().ok_or(Error::EmptyHistory)?;
    last.patch.revert(&mut s.graph);
    s.refresh();
    Ok(Json(s.view(&id)))
}

async fn dot(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let s = st.session(&id)?;
    let text = to_dot(&lock(&s).graph);
    Ok(([(header::CONTENT_TYPE, "text/vnd.graphviz; charset=utf-8")], text).into_response())
}

async fn remove(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    lock(&st.sessions).remove(&id).ok_or(Error::UnknownSession(id))?;
    Ok(StatusCode::NO_CONTENT)
}
