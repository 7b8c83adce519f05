use std::time::Duration;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use novelty_board::play::{play, prepare, GameConfig};
use serde_json::{json, Value};
use sim_service::{router, ServiceConfig};
use tempfile::TempDir;
use tower::ServiceExt;

struct Reply {
    status: StatusCode,
    retry_after: Option<String>,
    bytes: Vec<u8>,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_slice(&self.bytes).unwrap_or_else(|_| panic!("not JSON: {}", String::from_utf8_lossy(&self.bytes)))
    }
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> Reply {
    let request = Request::builder().method(method).uri(uri);
    let request = match body {
        Some(b) => request
            .header(header::CONTENT_TYPE, "application/json")
            .body(Body::from(b.to_string())),
        None => request.body(Body::empty()),
    }
    .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let retry_after = response
        .headers()
        .get(header::RETRY_AFTER)
        .map(|v| v.to_str().unwrap().to_string());
    let bytes = response.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply {
        status,
        retry_after,
        bytes,
    }
}

fn app(workers: usize, queue: usize) -> (Router, TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ServiceConfig::new(dir.path());
    config.workers = workers;
    config.queue = queue;
    (router(config), dir)
}

async fn wait_for(app: &Router, uri: &str) -> Reply {
    for _ in 0..600 {
        let reply = call(app, "GET", uri, None).await;
        if reply.status != StatusCode::CONFLICT {
            return reply;
        }
        tokio::time::sleep(Duration::from_millis(50)).await;
    }
    panic!("{uri} never became ready");
}

fn error_code(reply: &Reply) -> String {
    reply.json()["error"]["code"].as_str().unwrap().to_string()
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn agent_catalog_is_stable() {
    let (app, _dir) = app(1, 4);
    let first = call(&app, "GET", "/api/agents", None).await;
    assert_eq!(first.status, StatusCode::OK);
    let agents = first.json()["agents"].as_array().unwrap().clone();
    assert!(agents.len() >= 4);
    for id in ["simple", "h1", "h2", "hybrid"] {
        assert!(agents.iter().any(|a| a["id"] == id && !a["description"].as_str().unwrap().is_empty()));
    }
    let second = call(&app, "GET", "/api/agents", None).await;
    assert_eq!(first.bytes, second.bytes);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn novelty_catalog_lists_demo_families() {
    let (app, _dir) = app(1, 4);
    let reply = call(&app, "GET", "/api/novelties", None).await;
    assert_eq!(reply.status, StatusCode::OK);
    let list = reply.json()["novelties"].as_array().unwrap().clone();
    assert!(list.iter().any(|n| n["key"] == "none" && n["spec"].is_null()));
    for family in ["dice-count", "color-collapse", "swap-extend"] {
        assert!(list.iter().any(|n| n["family"] == family), "missing {family}");
    }
    let counts: Vec<u64> = list
        .iter()
        .filter(|n| n["family"] == "dice-count")
        .map(|n| n["parameters"]["count"].as_u64().unwrap())
        .collect();
    assert_eq!(counts, [3, 4, 5]);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn game_run_serves_frames_and_result() {
    let (app, dir) = app(2, 4);
    let body = json!({
        "agents": ["h1", "h1", "h2", "hybrid"],
        "novelty": "color-collapse-keep-blue",
        "seed": 21,
        "round_trip_cap": 60,
    });
    let reply = call(&app, "POST", "/api/games", Some(body)).await;
    assert_eq!(reply.status, StatusCode::ACCEPTED);
    let handle = reply.json();
    let id = handle["id"].as_str().unwrap().to_string();
    assert_eq!(handle["kind"], "game");

    let result = wait_for(&app, &format!("/api/games/{id}/result")).await;
    assert_eq!(result.status, StatusCode::OK);
    let result = result.json();
    assert_eq!(result["run"]["status"], "finished");

    // The config echo alone reproduces the run.
    let config: GameConfig = serde_json::from_value(result["run"]["config"].clone()).unwrap();
    let (schema, _, _) = prepare(&config).unwrap();
    assert_eq!(schema.color_groups.len(), 2);
    let local = play(&config).unwrap();
    assert_eq!(serde_json::to_value(&local.record.result).unwrap(), result["result"]);

    let page = call(&app, "GET", &format!("/api/games/{id}/frames?from=0&count=10"), None).await;
    assert_eq!(page.status, StatusCode::OK);
    let again = call(&app, "GET", &format!("/api/games/{id}/frames?from=0&count=10"), None).await;
    assert_eq!(page.bytes, again.bytes);
    let page = page.json();
    assert_eq!(page["frames"].as_array().unwrap().len(), 10);
    assert_eq!(page["frames"][0]["index"], 0);
    let total = page["total"].as_u64().unwrap() as usize;
    assert_eq!(total, local.frames.frames.len());
    assert_eq!(page["end"], false);

    let last = call(&app, "GET", &format!("/api/games/{id}/frames?from={}&count=10", total - 1), None).await;
    let last = last.json();
    assert_eq!(last["end"], true);
    assert!(last["frames"][0]["result"].is_object());

    let beyond = call(&app, "GET", &format!("/api/games/{id}/frames?from={}", total + 5), None).await;
    assert_eq!(beyond.status, StatusCode::OK);
    let beyond = beyond.json();
    assert!(beyond["frames"].as_array().unwrap().is_empty());
    assert_eq!(beyond["end"], true);

    let run_dir = dir.path().join("runs").join(&id);
    for file in ["handle.json", "config.json", "log.ndjson", "result.json", "frames.ndjson"] {
        assert!(run_dir.join(file).is_file(), "missing {file}");
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn concurrent_games_stay_separate() {
    let (app, _dir) = app(2, 4);
    let mut ids = Vec::new();
    for seed in [1, 2] {
        let body = json!({"agents": ["simple", "simple", "h1", "h1"], "seed": seed, "round_trip_cap": 30});
        let reply = call(&app, "POST", "/api/games", Some(body)).await;
        assert_eq!(reply.status, StatusCode::ACCEPTED);
        ids.push(reply.json()["id"].as_str().unwrap().to_string());
    }
    assert_ne!(ids[0], ids[1]);
    let mut results = Vec::new();
    for id in &ids {
        let reply = wait_for(&app, &format!("/api/games/{id}/result")).await;
        let config: GameConfig = serde_json::from_value(reply.json()["run"]["config"].clone()).unwrap();
        let local = play(&config).unwrap();
        assert_eq!(serde_json::to_value(&local.record.result).unwrap(), reply.json()["result"]);
        results.push(reply.json()["result"].clone());
    }
    assert_ne!(results[0], results[1]);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn bad_game_requests_are_rejected() {
    let (app, _dir) = app(1, 4);
    let cases = [
        (json!({"agents": ["h1", "h1", "h2"]}), StatusCode::BAD_REQUEST, "seat-count"),
        (json!({"agents": ["h1", "h1", "h2", "h9"]}), StatusCode::BAD_REQUEST, "unknown-agent"),
        (json!({"agents": ["h1", "h1", "h2", "tcp:127.0.0.1:9"]}), StatusCode::BAD_REQUEST, "unknown-agent"),
        (json!({"agents": ["h1", "h1", "h2", "h2"], "novelty": "no-such"}), StatusCode::BAD_REQUEST, "unknown-novelty"),
        (json!({"agents": "h1"}), StatusCode::BAD_REQUEST, "malformed-request"),
        (
            json!({"agents": ["h1", "h1", "h2", "h2"], "novelty": {
                "name": "too-many-dice", "category": "class", "difficulty": "easy",
                "parameters": {"family": "dice-count", "count": 99}
            }}),
            StatusCode::UNPROCESSABLE_ENTITY,
            "invalid-novelty",
        ),
    ];
    for (body, status, code) in cases {
        let reply = call(&app, "POST", "/api/games", Some(body.clone())).await;
        assert_eq!(reply.status, status, "{body}");
        assert_eq!(error_code(&reply), code, "{body}");
    }
    let reply = call(
        &app,
        "POST",
        "/api/games",
        Some(json!({"agents": ["h1", "h1", "h2", "h2"], "novelty": {
            "name": "too-many-dice", "category": "class", "difficulty": "easy",
            "parameters": {"family": "dice-count", "count": 99}
        }})),
    )
    .await;
    assert!(!reply.json()["error"]["violations"].as_array().unwrap().is_empty());
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn omitted_seed_is_echoed() {
    let (app, _dir) = app(1, 4);
    let body = json!({"agents": ["h1", "h1", "h1", "h1"], "round_trip_cap": 5});
    let reply = call(&app, "POST", "/api/games", Some(body)).await;
    assert_eq!(reply.status, StatusCode::ACCEPTED);
    let seed = reply.json()["config"]["seed"].as_u64().unwrap();
    assert!(seed < 1 << 53);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn unknown_runs_are_not_found() {
    let (app, _dir) = app(1, 4);
    for uri in ["/api/games/nope/result", "/api/games/nope/frames", "/api/tournaments/nope/report", "/api/nothing"] {
        let reply = call(&app, "GET", uri, None).await;
        assert_eq!(reply.status, StatusCode::NOT_FOUND, "{uri}");
        assert!(reply.json()["error"]["code"].is_string());
    }
    let body = json!({"agents": ["h1", "h1", "h1", "h1"], "seed": 1, "round_trip_cap": 5});
    let id = call(&app, "POST", "/api/games", Some(body)).await.json()["id"].as_str().unwrap().to_string();
    let reply = call(&app, "GET", &format!("/api/tournaments/{id}/report"), None).await;
    assert_eq!(reply.status, StatusCode::NOT_FOUND);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn tournament_report_follows_lifecycle() {
    let (app, dir) = app(1, 4);
    let body = json!({
        "games": 6, "onset": 3, "novelty": "dice-count-4",
        "agents": ["h1", "h2", "simple", "hybrid"], "seed": 3, "round_trip_cap": 40,
    });
    let reply = call(&app, "POST", "/api/tournaments", Some(body)).await;
    assert_eq!(reply.status, StatusCode::ACCEPTED);
    let id = reply.json()["id"].as_str().unwrap().to_string();
    let early = call(&app, "GET", &format!("/api/tournaments/{id}/report"), None).await;
    assert!(matches!(early.status, StatusCode::CONFLICT | StatusCode::OK));
    if early.status == StatusCode::CONFLICT {
        assert_eq!(error_code(&early), "not-ready");
    }
    let report = wait_for(&app, &format!("/api/tournaments/{id}/report")).await;
    assert_eq!(report.status, StatusCode::OK);
    let report = report.json();
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[1]["phase"], "pre");
    assert_eq!(rows[2]["phase"], "post");
    assert_eq!(report["metrics"].as_array().unwrap().len(), 4);
    assert!(dir.path().join("runs").join(&id).join("report.csv").is_file());
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn report_is_not_ready_while_queued() {
    let (app, _dir) = app(1, 4);
    let slow = json!({"agents": ["h1", "h1", "h2", "h2"], "seed": 5});
    assert_eq!(call(&app, "POST", "/api/games", Some(slow)).await.status, StatusCode::ACCEPTED);
    let body = json!({
        "games": 2, "onset": 2, "novelty": "dice-count-3", "agents": ["h1", "h1", "h1", "h1"], "seed": 1,
    });
    let id = call(&app, "POST", "/api/tournaments", Some(body)).await.json()["id"].as_str().unwrap().to_string();
    let reply = call(&app, "GET", &format!("/api/tournaments/{id}/report"), None).await;
    assert_eq!(reply.status, StatusCode::CONFLICT);
    assert_eq!(error_code(&reply), "not-ready");
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn invalid_tournament_configs_are_rejected() {
    let (app, _dir) = app(1, 4);
    let body = json!({"games": 5, "onset": 9, "novelty": "dice-count-3", "agents": ["h1", "h1", "h1", "h1"]});
    let reply = call(&app, "POST", "/api/tournaments", Some(body)).await;
    assert_eq!(reply.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(error_code(&reply), "invalid-config");
    let body = json!({"games": 5, "onset": 2, "agents": ["h1", "h1", "h1", "h1"]});
    assert_eq!(call(&app, "POST", "/api/tournaments", Some(body)).await.status, StatusCode::BAD_REQUEST);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn full_queue_asks_clients_to_retry() {
    let (app, _dir) = app(1, 0);
    let body = json!({"agents": ["h1", "h1", "h2", "h2"], "seed": 8});
    assert_eq!(call(&app, "POST", "/api/games", Some(body.clone())).await.status, StatusCode::ACCEPTED);
    let reply = call(&app, "POST", "/api/games", Some(body)).await;
    assert_eq!(reply.status, StatusCode::SERVICE_UNAVAILABLE);
    assert_eq!(error_code(&reply), "busy");
    assert!(reply.retry_after.is_some());
}
