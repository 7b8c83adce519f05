//! HTTP facade over the simulator: agent and novelty catalogs, game and
//! tournament runs on a bounded worker pool, and their artifacts.

mod error;
mod runs;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use novelty_board::agents::{AgentBinding, AgentDescriptor, AGENT_CATALOG};
use novelty_board::board::Violation;
use novelty_board::novelty::{demo_novelties, enumerate_library, find_spec, load_specs, NoveltyError, NoveltySpec};
use novelty_board::play::{prepare, GameConfig, PlayError};
use novelty_board::tournament::TournamentConfig;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tower_http::services::ServeDir;

pub use error::ApiError;
pub use runs::{RunHandle, RunKind, RunStatus};

use runs::{Artifacts, Registry};

/// Frames per page when the client does not ask for a count.
pub const DEFAULT_PAGE: usize = 100;
pub const MAX_PAGE: usize = 1000;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Run artifacts are written under `data_dir/runs/<id>/`.
    pub data_dir: PathBuf,
    /// Runs executing at once.
    pub workers: usize,
    /// Runs allowed to wait for a worker before new ones are refused.
    pub queue: usize,
    /// Directory served at `/` (the web demo build), if any.
    pub static_dir: Option<PathBuf>,
}

impl ServiceConfig {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            data_dir: data_dir.into(),
            workers: 2,
            queue: 16,
            static_dir: None,
        }
    }
}

#[derive(Clone)]
pub struct AppState {
    registry: Arc<Registry>,
}

pub fn router(config: ServiceConfig) -> Router {
    let static_dir = config.static_dir.clone();
    let state = AppState {
        registry: Arc::new(Registry::new(config)),
    };
    let api = Router::new()
        .route("/api/agents", get(list_agents))
        .route("/api/novelties", get(list_novelties))
        .route("/api/games", post(start_game))
        .route("/api/games/{id}", get(game_handle))
        .route("/api/games/{id}/frames", get(game_frames))
        .route("/api/games/{id}/result", get(game_result))
        .route("/api/tournaments", post(start_tournament))
        .route("/api/tournaments/{id}", get(tournament_handle))
        .route("/api/tournaments/{id}/report", get(tournament_report))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not-found", "no such endpoint") })
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    serve_on(tokio::net::TcpListener::bind(addr).await?, config).await
}

/// Serves on an already bound listener.
pub async fn serve_on(listener: tokio::net::TcpListener, config: ServiceConfig) -> std::io::Result<()> {
    std::fs::create_dir_all(config.data_dir.join("runs"))?;
    axum::serve(listener, router(config)).await
}

// ---------------------------------------------------------------- catalogs

#[derive(Serialize)]
struct AgentList {
    agents: &'static [AgentDescriptor],
}

async fn list_agents() -> Json<AgentList> {
    Json(AgentList { agents: AGENT_CATALOG })
}

/// One selectable novelty. The `none` entry has no family and no spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoveltyDescriptor {
    pub key: String,
    pub label: String,
    pub family: Option<String>,
    pub category: Option<String>,
    pub description: String,
    /// The spec's parameter block and sampler, for building a form.
    pub parameters: Option<Value>,
    pub sampler: Option<Value>,
    pub spec: Option<NoveltySpec>,
}

pub const NO_NOVELTY: &str = "none";

fn descriptor(spec: &NoveltySpec) -> NoveltyDescriptor {
    let body = Value::from(spec.clone());
    NoveltyDescriptor {
        key: spec.name().to_string(),
        label: spec.name().replace('-', " "),
        family: body["parameters"]["family"].as_str().map(str::to_string),
        category: Some(spec.category().to_string()),
        description: spec.description().to_string(),
        parameters: Some(body["parameters"].clone()),
        sampler: body.get("sampler").filter(|s| !s.is_null()).cloned(),
        spec: Some(spec.clone()),
    }
}

pub fn novelty_catalog() -> Vec<NoveltyDescriptor> {
    let none = NoveltyDescriptor {
        key: NO_NOVELTY.into(),
        label: "no novelty".into(),
        family: None,
        category: None,
        description: "The standard board and dice.".into(),
        parameters: None,
        sampler: None,
        spec: None,
    };
    std::iter::once(none).chain(demo_novelties().iter().map(descriptor)).collect()
}

#[derive(Serialize)]
struct NoveltyList {
    novelties: Vec<NoveltyDescriptor>,
}

async fn list_novelties() -> Json<NoveltyList> {
    Json(NoveltyList {
        novelties: novelty_catalog(),
    })
}

// ---------------------------------------------------------------- requests

/// Resolves a novelty field: a library name or id, `"none"`, or a full spec.
fn resolve_novelty(choice: Option<Value>) -> Result<Option<NoveltySpec>, ApiError> {
    match choice {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(key)) if key == NO_NOVELTY => Ok(None),
        Some(Value::String(key)) => find_spec(&enumerate_library(), &key)
            .cloned()
            .map(Some)
            .ok_or_else(|| ApiError::bad_request("unknown-novelty", format!("no novelty named '{key}'"))),
        Some(doc @ Value::Object(_)) => match load_specs(&doc.to_string()) {
            Ok(mut specs) if specs.len() == 1 => Ok(specs.pop()),
            Ok(_) => Err(ApiError::bad_request("malformed-request", "expected one novelty spec")),
            Err(NoveltyError::Invalid(violations)) => Err(invalid(
                "invalid-novelty",
                NoveltyError::Invalid(violations.clone()).to_string(),
                violations,
            )),
            Err(e) => Err(ApiError::bad_request("malformed-request", e.to_string())),
        },
        Some(_) => Err(ApiError::bad_request("malformed-request", "novelty must be a name or a spec")),
    }
}

/// Only built-in agents may be seated through the service; endpoints that
/// run commands or dial out stay a command-line feature.
fn builtin_agents(ids: &[String]) -> Result<Vec<AgentBinding>, ApiError> {
    ids.iter()
        .map(|id| match id.parse::<AgentBinding>() {
            Ok(b @ AgentBinding::Builtin(_)) => Ok(b),
            _ => Err(ApiError::bad_request("unknown-agent", format!("unknown agent '{id}'"))),
        })
        .collect()
}

/// Seeds chosen by the server stay below 2^53 so that JSON clients keep
/// them exact.
fn server_seed() -> u64 {
    rand::random::<u64>() >> 11
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request("malformed-request", e.to_string()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameRequest {
    agents: Vec<String>,
    #[serde(default)]
    novelty: Option<Value>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    round_trip_cap: Option<u32>,
}

async fn start_game(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let request: GameRequest = parse_body(&body)?;
    if request.agents.len() != 4 {
        return Err(ApiError::bad_request(
            "seat-count",
            format!("a game needs exactly 4 agents, got {}", request.agents.len()),
        ));
    }
    let agents = builtin_agents(&request.agents)?;
    let novelty = resolve_novelty(request.novelty)?;
    let mut config = GameConfig::new(agents, novelty, request.seed.unwrap_or_else(server_seed));
    config.round_trip_cap = request.round_trip_cap;
    if let Err(e) = prepare(&config) {
        return Err(match e {
            PlayError::Novelty(inj) => invalid("invalid-novelty", inj.to_string(), inj.violations().to_vec()),
            other => ApiError::bad_request("invalid-game", other.to_string()),
        });
    }
    let handle = state.registry.submit_game(config)?;
    Ok((StatusCode::ACCEPTED, Json(handle)).into_response())
}

fn invalid(code: &'static str, message: String, violations: Vec<Violation>) -> ApiError {
    ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, code, message).with_violations(violations)
}

async fn start_tournament(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let mut value: Value = parse_body(&body)?;
    let Some(object) = value.as_object_mut() else {
        return Err(ApiError::bad_request("malformed-request", "expected a JSON object"));
    };
    if !object.contains_key("seed") {
        object.insert("seed".into(), server_seed().into());
    }
    let spec = resolve_novelty(object.remove("novelty"))?
        .ok_or_else(|| ApiError::bad_request("missing-novelty", "a tournament needs a novelty"))?;
    object.insert("novelty".into(), Value::from(spec));
    if let Some(agents) = object.get("agents").and_then(Value::as_array) {
        let ids: Vec<String> = agents.iter().map(|a| a.as_str().unwrap_or_default().to_string()).collect();
        builtin_agents(&ids)?;
    }
    let config: TournamentConfig =
        serde_json::from_value(value).map_err(|e| ApiError::bad_request("malformed-request", e.to_string()))?;
    let problems = config.violations();
    if !problems.is_empty() {
        let message = problems.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
        return Err(invalid("invalid-config", message, problems));
    }
    let handle = state.registry.submit_tournament(config)?;
    Ok((StatusCode::ACCEPTED, Json(handle)).into_response())
}

// ---------------------------------------------------------------- run queries

async fn game_handle(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<RunHandle>, ApiError> {
    state.registry.handle(&id, RunKind::Game).map(Json)
}

async fn tournament_handle(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<RunHandle>, ApiError> {
    state.registry.handle(&id, RunKind::Tournament).map(Json)
}

#[derive(Debug, Deserialize)]
struct PageQuery {
    #[serde(default)]
    from: usize,
    #[serde(default)]
    count: Option<usize>,
}

/// A page of replay frames. `end` is set once the page reaches the last
/// frame of a finished game.
#[derive(Debug, Serialize, Deserialize)]
pub struct FramePage {
    pub run: String,
    pub status: RunStatus,
    pub from: usize,
    pub total: Option<usize>,
    pub frames: Vec<Value>,
    pub end: bool,
}

async fn game_frames(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(query): Query<PageQuery>,
) -> Result<Json<FramePage>, ApiError> {
    let count = query.count.unwrap_or(DEFAULT_PAGE).min(MAX_PAGE);
    let (handle, artifacts) = state.registry.artifacts(&id, RunKind::Game)?;
    let page = match artifacts.as_deref() {
        Some(Artifacts::Game { frames, .. }) => {
            let start = query.from.min(frames.len());
            let end = query.from.saturating_add(count).min(frames.len());
            FramePage {
                run: id,
                status: handle.status,
                from: query.from,
                total: Some(frames.len()),
                frames: frames[start..end].to_vec(),
                end: end >= frames.len(),
            }
        }
        _ => FramePage {
            run: id,
            status: handle.status,
            from: query.from,
            total: None,
            frames: Vec::new(),
            end: handle.status == RunStatus::Failed,
        },
    };
    Ok(Json(page))
}

async fn game_result(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let (handle, artifacts) = state.registry.artifacts(&id, RunKind::Game)?;
    match artifacts.as_deref() {
        Some(Artifacts::Game { result, instance, .. }) => Ok(Json(serde_json::json!({
            "run": handle,
            "novelty_instance": instance,
            "result": result,
        }))
        .into_response()),
        _ => Err(not_finished(&handle)),
    }
}

async fn tournament_report(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let (handle, artifacts) = state.registry.artifacts(&id, RunKind::Tournament)?;
    match artifacts.as_deref() {
        Some(Artifacts::Tournament { report }) => Ok((
            [(axum::http::header::CONTENT_TYPE, "application/json")],
            report.clone(),
        )
            .into_response()),
        _ => Err(not_finished(&handle)),
    }
}

fn not_finished(handle: &RunHandle) -> ApiError {
    match handle.status {
        RunStatus::Failed => ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            "run-failed",
            handle.error.clone().unwrap_or_else(|| "run failed".into()),
        ),
        status => ApiError::new(StatusCode::CONFLICT, "not-ready", format!("run is {status}")),
    }
}
