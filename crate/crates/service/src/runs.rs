use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::http::StatusCode;
use novelty_board::play::{play, GameConfig};
use novelty_board::replay::export_frames;
use novelty_board::tournament::{run_tournament, TournamentConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tokio::sync::Semaphore;

use crate::{ApiError, ServiceConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunKind {
    Game,
    Tournament,
}

/// Ordered: a run only ever moves to a later status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Queued,
    Running,
    Finished,
    Failed,
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunStatus::Queued => "queued",
            RunStatus::Running => "running",
            RunStatus::Finished => "finished",
            RunStatus::Failed => "failed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHandle {
    pub id: String,
    pub kind: RunKind,
    pub status: RunStatus,
    /// The full configuration the run executes, including a server-chosen seed.
    pub config: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Milliseconds since the Unix epoch.
    pub created_ms: u64,
    pub updated_ms: u64,
}

pub(crate) enum Artifacts {
    Game {
        result: Value,
        instance: Option<Value>,
        frames: Vec<Value>,
    },
    Tournament {
        report: String,
    },
}

struct Run {
    handle: RunHandle,
    artifacts: Option<Arc<Artifacts>>,
}

enum Job {
    Game(GameConfig),
    Tournament(TournamentConfig),
}

pub(crate) struct Registry {
    config: ServiceConfig,
    runs: Mutex<HashMap<String, Run>>,
    workers: Arc<Semaphore>,
    /// Runs queued or running.
    in_flight: AtomicU64,
    next: AtomicU64,
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

impl Registry {
    pub(crate) fn new(config: ServiceConfig) -> Self {
        Registry {
            workers: Arc::new(Semaphore::new(config.workers.max(1))),
            config,
            runs: Mutex::new(HashMap::new()),
            in_flight: AtomicU64::new(0),
            next: AtomicU64::new(1),
        }
    }

    pub(crate) fn submit_game(self: &Arc<Self>, config: GameConfig) -> Result<RunHandle, ApiError> {
        let echo = serde_json::to_value(&config).expect("configs serialize");
        self.submit(RunKind::Game, echo, Job::Game(config))
    }

    pub(crate) fn submit_tournament(self: &Arc<Self>, config: TournamentConfig) -> Result<RunHandle, ApiError> {
        let echo = serde_json::to_value(&config).expect("configs serialize");
        self.submit(RunKind::Tournament, echo, Job::Tournament(config))
    }

    fn submit(self: &Arc<Self>, kind: RunKind, echo: Value, job: Job) -> Result<RunHandle, ApiError> {
        let capacity = (self.config.workers.max(1) + self.config.queue) as u64;
        let admitted = self
            .in_flight
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| (n < capacity).then_some(n + 1))
            .is_ok();
        if !admitted {
            let mut e = ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "busy", "all workers busy and queue full");
            e.retry_after = Some(2);
            return Err(e);
        }
        let prefix = match kind {
            RunKind::Game => "g",
            RunKind::Tournament => "t",
        };
        let id = format!("{prefix}{:05}-{:08x}", self.next.fetch_add(1, Ordering::SeqCst), rand::random::<u32>());
        let at = now_ms();
        let handle = RunHandle {
            id: id.clone(),
            kind,
            status: RunStatus::Queued,
            config: echo,
            error: None,
            created_ms: at,
            updated_ms: at,
        };
        self.runs.lock().unwrap().insert(
            id.clone(),
            Run {
                handle: handle.clone(),
                artifacts: None,
            },
        );
        let registry = self.clone();
        tokio::spawn(async move {
            let permit = registry.workers.clone().acquire_owned().await.expect("semaphore stays open");
            registry.advance(&id, RunStatus::Running, None);
            let worker = registry.clone();
            let run_id = id.clone();
            let outcome = tokio::task::spawn_blocking(move || worker.execute(&run_id, job))
                .await
                .unwrap_or_else(|e| Err(format!("worker panicked: {e}")));
            match outcome {
                Ok(artifacts) => {
                    registry.runs.lock().unwrap().get_mut(&id).expect("run registered").artifacts =
                        Some(Arc::new(artifacts));
                    registry.advance(&id, RunStatus::Finished, None);
                }
                Err(e) => registry.advance(&id, RunStatus::Failed, Some(e)),
            }
            registry.persist_handle(&id);
            drop(permit);
            registry.in_flight.fetch_sub(1, Ordering::SeqCst);
        });
        self.persist_handle(&handle.id);
        Ok(handle)
    }

    fn advance(&self, id: &str, status: RunStatus, error: Option<String>) {
        let mut runs = self.runs.lock().unwrap();
        let run = runs.get_mut(id).expect("run registered");
        if status > run.handle.status {
            run.handle.status = status;
            run.handle.error = error;
            run.handle.updated_ms = now_ms();
        }
    }

    fn run_dir(&self, id: &str) -> PathBuf {
        self.config.data_dir.join("runs").join(id)
    }

    fn persist_handle(&self, id: &str) {
        let Some(handle) = self.runs.lock().unwrap().get(id).map(|r| r.handle.clone()) else {
            return;
        };
        let dir = self.run_dir(id);
        if fs::create_dir_all(&dir).is_ok() {
            let _ = fs::write(dir.join("handle.json"), serde_json::to_vec_pretty(&handle).expect("handles serialize"));
        }
    }

    fn execute(&self, id: &str, job: Job) -> Result<Artifacts, String> {
        let dir = self.run_dir(id);
        fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
        let write = |name: &str, bytes: &[u8]| fs::write(dir.join(name), bytes).map_err(|e| format!("{name}: {e}"));
        match job {
            Job::Game(config) => {
                write("config.json", &serde_json::to_vec_pretty(&config).expect("configs serialize"))?;
                let out = play(&config).map_err(|e| e.to_string())?;
                write("log.ndjson", out.record.log_text().as_bytes())?;
                let result = serde_json::to_value(&out.record.result).expect("results serialize");
                write("result.json", &serde_json::to_vec_pretty(&result).expect("values serialize"))?;
                let stream = export_frames(&out.frames.frames, "ndjson").map_err(|e| e.to_string())?;
                write("frames.ndjson", &stream)?;
                Ok(Artifacts::Game {
                    result,
                    instance: out.instance.map(|i| serde_json::to_value(i).expect("instances serialize")),
                    frames: out
                        .frames
                        .frames
                        .iter()
                        .map(|f| serde_json::to_value(f).expect("frames serialize"))
                        .collect(),
                })
            }
            Job::Tournament(config) => {
                write("config.json", &serde_json::to_vec_pretty(&config).expect("configs serialize"))?;
                let report = run_tournament(&config).map_err(|e| e.to_string())?;
                let json = report.to_json();
                write("report.json", json.as_bytes())?;
                write("report.csv", report.to_csv().as_bytes())?;
                Ok(Artifacts::Tournament { report: json })
            }
        }
    }

    pub(crate) fn handle(&self, id: &str, kind: RunKind) -> Result<RunHandle, ApiError> {
        self.artifacts(id, kind).map(|(h, _)| h)
    }

    pub(crate) fn artifacts(&self, id: &str, kind: RunKind) -> Result<(RunHandle, Option<Arc<Artifacts>>), ApiError> {
        let runs = self.runs.lock().unwrap();
        match runs.get(id) {
            Some(run) if run.handle.kind == kind => Ok((run.handle.clone(), run.artifacts.clone())),
            _ => Err(ApiError::new(StatusCode::NOT_FOUND, "unknown-run", format!("no {kind:?} run '{id}'").to_lowercase())),
        }
    }
}
