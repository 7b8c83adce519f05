//! One configured game: agents, an optional novelty and a seed, run to the
//! end with its log, result and replay frames.

use std::sync::Arc;
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{build_agent, AgentBinding, AgentError};
use crate::board::{validate_schema, BoardSchema, Violation};
use crate::engine::{parse_event_log, run_game, GameError, GameLimits, GameRecord, SEATS};
use crate::novelty::{apply_novelty, sample_instance, InjectionError, NoveltyInstance, NoveltySpec};
use crate::replay::{build_frames, FrameSet};
use crate::tournament::derive_seed;

const INSTANCE_STREAM: u64 = 2;

fn default_timeout() -> u64 {
    crate::protocol::DEFAULT_TIMEOUT.as_millis() as u64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub agents: Vec<AgentBinding>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub novelty: Option<NoveltySpec>,
    pub seed: u64,
    /// Base board; the US layout when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub board: Option<BoardSchema>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round_trip_cap: Option<u32>,
    #[serde(default = "default_timeout")]
    pub agent_timeout_ms: u64,
}

impl GameConfig {
    pub fn new(agents: Vec<AgentBinding>, novelty: Option<NoveltySpec>, seed: u64) -> Self {
        GameConfig {
            agents,
            novelty,
            seed,
            board: None,
            round_trip_cap: None,
            agent_timeout_ms: default_timeout(),
        }
    }

    /// The novelty instance this config plays, drawn from the seed alone.
    pub fn instance(&self) -> Option<NoveltyInstance> {
        let spec = self.novelty.as_ref()?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, INSTANCE_STREAM, 0));
        Some(sample_instance(spec, &mut rng, 0))
    }

    pub fn limits(&self) -> GameLimits {
        let mut limits = GameLimits::default();
        if let Some(cap) = self.round_trip_cap {
            limits.round_trip_cap = cap;
        }
        limits
    }
}

#[derive(Debug, Error)]
pub enum PlayError {
    #[error("a game needs exactly {SEATS} agents, got {0}")]
    SeatCount(usize),
    #[error("board is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Board(Vec<Violation>),
    #[error(transparent)]
    Novelty(#[from] InjectionError),
    #[error("seat {seat}: {source}")]
    Agent {
        seat: usize,
        #[source]
        source: AgentError,
    },
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Clone)]
pub struct PlayOutcome {
    pub instance: Option<NoveltyInstance>,
    pub schema: Arc<BoardSchema>,
    pub record: GameRecord,
    pub frames: FrameSet,
}

/// Checks everything that can be checked without contacting agents.
pub fn prepare(config: &GameConfig) -> Result<(Arc<BoardSchema>, GameLimits, Option<NoveltyInstance>), PlayError> {
    if config.agents.len() != SEATS {
        return Err(PlayError::SeatCount(config.agents.len()));
    }
    let base = config.board.clone().unwrap_or_else(BoardSchema::us_default);
    let problems = validate_schema(&base);
    if !problems.is_empty() {
        return Err(PlayError::Board(problems));
    }
    let instance = config.instance();
    let (schema, limits) = match &instance {
        None => (base, config.limits()),
        Some(inst) => apply_novelty(&base, &config.limits(), inst)?,
    };
    Ok((Arc::new(schema), limits, instance))
}

pub fn play(config: &GameConfig) -> Result<PlayOutcome, PlayError> {
    let (schema, limits, instance) = prepare(config)?;
    let timeout = Duration::from_millis(config.agent_timeout_ms);
    let mut agents = Vec::with_capacity(SEATS);
    for (seat, binding) in config.agents.iter().enumerate() {
        agents.push(build_agent(binding, timeout).map_err(|source| PlayError::Agent { seat, source })?);
    }
    let record = run_game(schema.clone(), &mut agents, config.seed, &limits)?;
    let parsed = parse_event_log(&record.log_text()).expect("engine logs parse");
    let frames = build_frames(&parsed).expect("engine logs fold");
    Ok(PlayOutcome {
        instance,
        schema,
        record,
        frames,
    })
}
