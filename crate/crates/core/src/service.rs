//! JSON-over-HTTP API for interactive sessions.
//!
//! | method | path | |
//! |---|---|---|
//! | `POST` | `/api/sessions` | body: network document; creates a session at t = 0 |
//! | `GET` | `/api/sessions/{id}/history` | all snapshots |
//! | `POST` | `/api/sessions/{id}/ground` | body: `{"node", "state"}`; appends a snapshot |
//! | `POST` | `/api/sessions/{id}/preview` | same body; returns the snapshot without committing it |
//! | `GET` | `/api/sessions/{id}/explain` | query: `focal=NODE=state` (or `node` and `state`), `from`, `to`, `support`, `rho`, `eps_bel` |
//! | `DELETE` | `/api/sessions/{id}` | |
//! | `GET` | `/api/health` | |
//!
//! Errors come back as `{"code", "message", "detail"}`.

use std::collections::HashMap;
use std::net::SocketAddr;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::CorsLayer;
use uuid::Uuid;

use crate::error::Error;
use crate::history::{Grounding, NodeMeta, Snapshot};
use crate::network::{Network, NetworkDoc};
use crate::planner::{ExplanationPlan, PlannerConfig, SupportSelection};
use crate::session::{parse_focal, SessionStore, SharedSession};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status: status.as_u16(),
            code: code.to_string(),
            message: message.into(),
            detail: None,
        }
    }

    fn unknown_session(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "unknown_session", format!("no session `{id}`"))
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::AlreadyGrounded(_) => StatusCode::CONFLICT,
            Error::ZeroProbabilityEvidence { .. } | Error::ContradictoryEvidence => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
            e if e.is_internal() => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        let detail = match &e {
            Error::NoValidThreshold(state) => serde_json::from_str(state).ok(),
            _ => None,
        };
        ApiError {
            status: status.as_u16(),
            code: e.code().to_string(),
            message: e.to_string(),
            detail,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreatedSession {
    pub session_id: Uuid,
    pub network_id: String,
    pub nodes: Vec<NodeMeta>,
    pub snapshot: Snapshot,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExplainResponse {
    pub plan: ExplanationPlan,
    pub text: String,
    pub paragraphs: Vec<String>,
    pub slots: std::collections::BTreeMap<String, String>,
}

pub fn router(store: SessionStore) -> Router {
    Router::new()
        .route("/api/health", get(|| async { Json(json!({"status": "ok"})) }))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", axum::routing::delete(delete_session))
        .route("/api/sessions/{id}/history", get(history))
        .route("/api/sessions/{id}/ground", post(ground))
        .route("/api/sessions/{id}/preview", post(preview))
        .route("/api/sessions/{id}/explain", get(explain))
        .layer(CorsLayer::permissive())
        .with_state(store)
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(addr: SocketAddr, store: SessionStore) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(store)).await
}

fn parse_body<T: serde::de::DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| Error::Parse(e).into())
}

fn lookup(store: &SessionStore, id: &str) -> ApiResult<SharedSession> {
    Uuid::parse_str(id)
        .ok()
        .and_then(|u| store.get(&u))
        .ok_or_else(|| ApiError::unknown_session(id))
}

async fn create_session(
    State(store): State<SessionStore>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<CreatedSession>)> {
    let doc: NetworkDoc = parse_body(&body)?;
    let network = Network::from_doc(&doc)?;
    let shared = store.create(network)?;
    let s = shared.lock().expect("session poisoned");
    Ok((
        StatusCode::CREATED,
        Json(CreatedSession {
            session_id: s.id,
            network_id: s.history.network_id().to_string(),
            nodes: s.history.nodes().to_vec(),
            snapshot: s.history.latest().clone(),
        }),
    ))
}

async fn delete_session(
    State(store): State<SessionStore>,
    Path(id): Path<String>,
) -> ApiResult<StatusCode> {
    let uuid = Uuid::parse_str(&id).map_err(|_| ApiError::unknown_session(&id))?;
    if store.remove(&uuid)? {
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(ApiError::unknown_session(&id))
    }
}

async fn history(State(store): State<SessionStore>, Path(id): Path<String>) -> ApiResult<Response> {
    let shared = lookup(&store, &id)?;
    let s = shared.lock().expect("session poisoned");
    Ok(Json(&s.history).into_response())
}

async fn ground(
    State(store): State<SessionStore>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<Snapshot>> {
    let g: Grounding = parse_body(&body)?;
    let shared = lookup(&store, &id)?;
    let mut s = shared.lock().expect("session poisoned");
    let snap = s.ground(&g.node, &g.state)?.clone();
    store.save(&s)?;
    Ok(Json(snap))
}

async fn preview(
    State(store): State<SessionStore>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<Snapshot>> {
    let g: Grounding = parse_body(&body)?;
    let shared = lookup(&store, &id)?;
    let s = shared.lock().expect("session poisoned");
    Ok(Json(s.preview(&g.node, &g.state)?))
}

fn query_param<T: std::str::FromStr>(q: &HashMap<String, String>, key: &str) -> ApiResult<Option<T>> {
    match q.get(key) {
        None => Ok(None),
        Some(raw) => raw.parse().map(Some).map_err(|_| {
            Error::Invalid(format!("query parameter `{key}` has invalid value `{raw}`")).into()
        }),
    }
}

async fn explain(
    State(store): State<SessionStore>,
    Path(id): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult<Json<ExplainResponse>> {
    let shared = lookup(&store, &id)?;
    let (node, state) = match (q.get("focal"), q.get("node"), q.get("state")) {
        (Some(focal), _, _) => {
            let (n, s) = parse_focal(focal)?;
            (n.to_string(), s.to_string())
        }
        (None, Some(n), Some(s)) => (n.clone(), s.clone()),
        _ => {
            return Err(Error::Invalid("give `focal=NODE=state` or both `node` and `state`".into()).into())
        }
    };
    let s = shared.lock().expect("session poisoned");
    let to: usize = query_param(&q, "to")?.unwrap_or(s.history.len() - 1);
    let from: usize = query_param(&q, "from")?.unwrap_or(to.saturating_sub(1));
    let support: SupportSelection = query_param(&q, "support")?.unwrap_or(SupportSelection::Auto);
    let defaults = PlannerConfig::default();
    let config = PlannerConfig {
        rho: query_param(&q, "rho")?.unwrap_or(defaults.rho),
        eps_bel: query_param(&q, "eps_bel")?.unwrap_or(defaults.eps_bel),
    };
    let (plan, text) = s.explain(&node, &state, from, to, support, &config)?;
    Ok(Json(ExplainResponse {
        plan,
        text: text.text,
        paragraphs: text.paragraphs,
        slots: text.slots,
    }))
}
