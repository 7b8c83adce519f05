use std::fmt;
use std::fs;
use std::io::{self, BufReader, Write};
use std::net::{SocketAddr, TcpListener};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use novelty_board::agents::{build_agent, Agent, AgentBinding, AgentError};
use novelty_board::board::{canonical_json, load_schema, BoardSchema, SchemaError, Violation};
use novelty_board::engine::{parse_event_log, run_game, GameLimits, GameResult};
use novelty_board::novelty::{
    apply_novelty, demo_novelties, enumerate_library, find_spec, load_specs, sample_instance, NoveltyError,
    NoveltyInstance, NoveltySpec, Sampler,
};
use novelty_board::play::{play as play_game, GameConfig, PlayError};
use novelty_board::protocol::serve_agent;
use novelty_board::replay::{build_frames, export_frames};
use novelty_board::tournament::{
    aggregate, derive_seed, run_tournament_with, SignificanceTest, TournamentConfig, TournamentError, TournamentReport,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sim_service::ServiceConfig;

use crate::{AgentArgs, BoardCommand, NoveltyCommand, PlayArgs, ReplayArgs, ServeArgs, SmokeArgs, TournamentArgs};

const SMOKE_STREAM: u64 = 3;
const SMOKE_OPPONENTS: [&str; 3] = ["h1", "h2", "h1"];

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable or invalid input files.
    Usage(String),
    /// Something failed while running.
    Runtime(String),
    /// Standard output was closed by the reader, e.g. `| head`.
    OutputClosed,
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
            CliError::OutputClosed => 0,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
            CliError::OutputClosed => f.write_str("output closed"),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn output_error(e: io::Error) -> CliError {
    if e.kind() == io::ErrorKind::BrokenPipe {
        CliError::OutputClosed
    } else {
        runtime(e)
    }
}

macro_rules! say {
    ($($arg:tt)*) => {
        writeln!(io::stdout(), $($arg)*).map_err(output_error)?
    };
}

fn usage(message: impl fmt::Display) -> CliError {
    CliError::Usage(message.to_string())
}

fn runtime(message: impl fmt::Display) -> CliError {
    CliError::Runtime(message.to_string())
}

fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = read_input(path)?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| runtime(format!("cannot create {}: {e}", parent.display())))?;
    }
    fs::write(path, bytes).map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

fn label<T: Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

fn print_violations(violations: &[Violation]) {
    let mut out = io::stdout();
    for v in violations {
        let _ = writeln!(out, "violation: {v}");
    }
}

fn parse_agents(ids: &[String]) -> CliResult<Vec<AgentBinding>> {
    ids.iter()
        .map(|id| id.parse::<AgentBinding>().map_err(usage))
        .collect()
}

/// A novelty argument: a spec file when the path exists, otherwise a
/// library name or id. `none` means no novelty.
fn resolve_novelty(arg: &str) -> CliResult<Option<NoveltySpec>> {
    if arg == "none" {
        return Ok(None);
    }
    let path = Path::new(arg);
    if path.is_file() {
        let mut specs = load_novelty_file(path)?;
        if specs.len() != 1 {
            return Err(usage(format!("{arg}: expected one novelty spec, found {}", specs.len())));
        }
        return Ok(specs.pop());
    }
    find_spec(&enumerate_library(), arg)
        .cloned()
        .map(Some)
        .ok_or_else(|| usage(format!("no novelty file or library entry named '{arg}'")))
}

fn load_novelty_file(path: &Path) -> CliResult<Vec<NoveltySpec>> {
    load_specs(&read_input(path)?).map_err(|e| {
        if let NoveltyError::Invalid(violations) = &e {
            print_violations(violations);
        }
        usage(format!("{}: {e}", path.display()))
    })
}

/// Config files may name a library novelty instead of spelling it out.
fn inline_novelty(doc: &mut Value) -> CliResult {
    let Some(obj) = doc.as_object_mut() else {
        return Err(usage("config must be a JSON object"));
    };
    if let Some(Value::String(key)) = obj.get("novelty").cloned() {
        match resolve_novelty(&key)? {
            Some(spec) => obj.insert("novelty".into(), spec.into()),
            None => obj.remove("novelty"),
        };
    }
    Ok(())
}

fn load_board(path: &Path) -> CliResult<BoardSchema> {
    load_schema(&read_input(path)?).map_err(|e| {
        if let SchemaError::Invalid(violations) = &e {
            print_violations(violations);
        }
        usage(format!("{}: {e}", path.display()))
    })
}

fn agent_error(seat: usize, e: AgentError) -> CliError {
    usage(format!("seat {seat}: {e}"))
}

fn describe_result(result: &GameResult) -> String {
    let winner = match result.winner {
        Some(seat) => format!("seat {seat} won"),
        None => "no winner".to_string(),
    };
    let round_trips = result.round_trips.iter().max().copied().unwrap_or(0);
    format!("{winner} ({}) after {round_trips} round trips", label(&result.termination))
}

// ---------------------------------------------------------------- play

pub fn play(args: PlayArgs) -> CliResult {
    let mut config = match &args.config {
        Some(path) => {
            let mut doc = read_json(path)?;
            inline_novelty(&mut doc)?;
            serde_json::from_value::<GameConfig>(doc).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => GameConfig::new(Vec::new(), None, 0),
    };
    if !args.agents.is_empty() {
        config.agents = parse_agents(&args.agents)?;
    }
    if config.agents.is_empty() {
        return Err(usage("four agents are required (--agents A,B,C,D)"));
    }
    if let Some(path) = &args.board {
        config.board = Some(load_board(path)?);
    }
    if let Some(novelty) = &args.novelty {
        config.novelty = resolve_novelty(novelty)?;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(cap) = args.cap {
        config.round_trip_cap = Some(cap);
    }
    if let Some(ms) = args.timeout_ms {
        config.agent_timeout_ms = ms;
    }
    let outcome = play_game(&config).map_err(|e| match e {
        PlayError::Game(e) => runtime(e),
        PlayError::Board(violations) => {
            print_violations(&violations);
            usage("board is invalid")
        }
        PlayError::Novelty(e) => {
            print_violations(e.violations());
            usage(e)
        }
        other => usage(other),
    })?;
    let frames = export_frames(&outcome.frames.frames, &args.frames).map_err(usage)?;
    let stem = format!("game-{}", config.seed);
    let frames_ext = if args.frames == "snapshots" { "txt" } else { "ndjson" };
    let report = json!({
        "config": config,
        "novelty_instance": outcome.instance,
        "board_hash": outcome.schema.content_hash(),
        "result": outcome.record.result,
    });
    let log_path = args.out.join("logs").join(format!("{stem}.ndjson"));
    let frames_path = args.out.join("frames").join(format!("{stem}.{frames_ext}"));
    let report_path = args.out.join("reports").join(format!("{stem}.json"));
    write_output(&log_path, outcome.record.log_text())?;
    write_output(&frames_path, frames)?;
    write_output(&report_path, canonical_json(&report) + "\n")?;
    say!("{stem}: {}", describe_result(&outcome.record.result));
    for path in [log_path, frames_path, report_path] {
        say!("wrote {}", path.display());
    }
    Ok(())
}

// ---------------------------------------------------------------- tournament

fn tournament_config(args: &TournamentArgs) -> CliResult<TournamentConfig> {
    let mut doc = match &args.config {
        Some(path) => read_json(path)?,
        None => json!({}),
    };
    let Some(obj) = doc.as_object_mut() else {
        return Err(usage("config must be a JSON object"));
    };
    if let Some(games) = args.games {
        obj.insert("games".into(), games.into());
    }
    if let Some(onset) = args.onset {
        obj.insert("onset".into(), onset.into());
    }
    if let Some(novelty) = &args.novelty {
        obj.insert("novelty".into(), novelty.as_str().into());
    }
    if !args.agents.is_empty() {
        obj.insert("agents".into(), json!(args.agents));
    }
    if let Some(seed) = args.seed {
        obj.insert("seed".into(), seed.into());
    }
    if let Some(cap) = args.cap {
        obj.insert("round_trip_cap".into(), cap.into());
    }
    obj.entry("seed").or_insert(0.into());
    if matches!(obj.get("novelty"), Some(Value::String(s)) if s == "none") {
        return Err(usage("a tournament needs a novelty"));
    }
    inline_novelty(&mut doc)?;
    let config: TournamentConfig = serde_json::from_value(doc).map_err(|e| usage(format!("tournament config: {e}")))?;
    let violations = config.violations();
    if !violations.is_empty() {
        print_violations(&violations);
        return Err(usage(format!("tournament config has {} violation(s)", violations.len())));
    }
    Ok(config)
}

fn run_repetition(config: &TournamentConfig, logs: Option<PathBuf>) -> CliResult<TournamentReport> {
    let timeout = Duration::from_millis(config.agent_timeout_ms);
    let mut agents = Vec::with_capacity(config.agents.len());
    for (seat, binding) in config.agents.iter().enumerate() {
        agents.push(build_agent(binding, timeout).map_err(|e| agent_error(seat, e))?);
    }
    let mut write_error = None;
    let report = run_tournament_with(config, &mut agents, |row, record| {
        if let (Some(dir), None) = (&logs, &write_error) {
            let path = dir.join(format!("game-{:04}.ndjson", row.game));
            if let Err(e) = write_output(&path, record.log_text()) {
                write_error = Some(e);
            }
        }
    })
    .map_err(|e| match e {
        TournamentError::Game { .. } => runtime(e),
        other => usage(other),
    })?;
    match write_error {
        Some(e) => Err(e),
        None => Ok(report),
    }
}

pub fn tournament(args: TournamentArgs) -> CliResult {
    let config = tournament_config(&args)?;
    let test = match args.test.as_str() {
        "z" => SignificanceTest::TwoProportionZ,
        "fisher" => SignificanceTest::FisherExact,
        other => return Err(usage(format!("unknown test '{other}' (expected z or fisher)"))),
    };
    if args.reps == 0 {
        return Err(usage("--reps must be at least 1"));
    }
    let jobs = match args.jobs {
        Some(0) => return Err(usage("--jobs must be at least 1")),
        Some(j) => j,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.min(args.reps as usize))
        .build()
        .map_err(runtime)?;
    let reports_dir = args.out.join("reports");
    let name = |rep: u32| format!("tournament-{:03}", rep + 1);
    let reports: Vec<TournamentReport> = pool.install(|| {
        (0..args.reps)
            .into_par_iter()
            .map(|rep| {
                let rep_config = config.repetition(rep);
                let logs = args.logs.then(|| args.out.join("logs").join(name(rep)));
                let report = run_repetition(&rep_config, logs)?;
                write_output(&reports_dir.join(format!("{}.json", name(rep))), report.to_json() + "\n")?;
                write_output(&reports_dir.join(format!("{}.csv", name(rep))), report.to_csv())?;
                Ok(report)
            })
            .collect::<CliResult<Vec<_>>>()
    })?;
    let summary = aggregate(&reports, test).map_err(runtime)?;
    let config_doc = serde_json::to_value(&config).map_err(runtime)?;
    write_output(&reports_dir.join("config.json"), canonical_json(&config_doc) + "\n")?;
    write_output(&reports_dir.join("summary.json"), summary.to_json() + "\n")?;
    let show = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3}"));
    say!(
        "{} tournament(s) of {} games, novelty {}",
        summary.tournaments, summary.games, summary.novelty_id
    );
    for seat in &summary.seats {
        say!(
            "seat {} {:<8} pre {} post {} (se {}) reaction {}",
            seat.seat,
            seat.agent,
            show(seat.pre_win_ratio.mean),
            show(seat.post_win_ratio.mean),
            show(seat.post_win_ratio.standard_error),
            show(seat.reaction.mean),
        );
    }
    say!("wrote {}", reports_dir.display());
    Ok(())
}

// ---------------------------------------------------------------- novelty

fn novelty_line(spec: &NoveltySpec) -> String {
    format!(
        "{:<20} {:<28} {:<8} {:<6} {}",
        spec.id(),
        spec.name(),
        spec.category().to_string(),
        label(&spec.difficulty()),
        spec.description()
    )
    .trim_end()
    .to_string()
}

/// Instances worth checking against a board: every listed choice, or a
/// fixed handful of draws for continuous samplers.
fn probe_instances(spec: &NoveltySpec) -> Vec<NoveltyInstance> {
    match spec.sampler() {
        Some(Sampler::Choice { options }) => options
            .iter()
            .map(|parameters| NoveltyInstance {
                spec_id: spec.id().to_string(),
                parameters: parameters.clone(),
                game_index: 0,
            })
            .collect(),
        _ => (0..8)
            .map(|i| sample_instance(spec, &mut ChaCha8Rng::seed_from_u64(i), 0))
            .collect(),
    }
}

pub fn novelty(command: NoveltyCommand) -> CliResult {
    match command {
        NoveltyCommand::List { demo } => {
            let specs = if demo { demo_novelties() } else { enumerate_library() };
            for spec in &specs {
                say!("{}", novelty_line(spec));
            }
            Ok(())
        }
        NoveltyCommand::Describe { key } => {
            let library = enumerate_library();
            let spec = find_spec(&library, &key).ok_or_else(|| usage(format!("no novelty named '{key}'")))?;
            say!("{}", spec.to_canonical_json());
            Ok(())
        }
        NoveltyCommand::Validate { path } => {
            let specs = load_novelty_file(&path)?;
            let base = BoardSchema::us_default();
            let limits = GameLimits::default();
            let mut failures = 0;
            for spec in &specs {
                let mut problems: Vec<Violation> = Vec::new();
                for instance in probe_instances(spec) {
                    if let Err(e) = apply_novelty(&base, &limits, &instance) {
                        problems.extend(e.violations().iter().cloned());
                    }
                }
                problems.dedup_by(|a, b| a.to_string() == b.to_string());
                if problems.is_empty() {
                    say!("ok {} {}", spec.id(), spec.name());
                } else {
                    failures += 1;
                    say!("invalid {} {}", spec.id(), spec.name());
                    print_violations(&problems);
                }
            }
            if failures > 0 {
                return Err(usage(format!("{failures} spec(s) cannot be applied to the default board")));
            }
            Ok(())
        }
    }
}

// ---------------------------------------------------------------- board

pub fn board(command: BoardCommand) -> CliResult {
    match command {
        BoardCommand::Default => {
            let doc = BoardSchema::default_document();
            io::stdout().write_all(doc.as_bytes()).map_err(output_error)?;
            if !doc.ends_with('\n') {
                say!();
            }
            Ok(())
        }
        BoardCommand::Validate { path } => {
            let schema = load_board(&path)?;
            say!(
                "ok: {} slots, {} color groups, hash {}",
                schema.slot_count(),
                schema.color_groups.len(),
                schema.content_hash()
            );
            Ok(())
        }
    }
}

// ---------------------------------------------------------------- replay

pub fn replay(args: ReplayArgs) -> CliResult {
    let text = read_input(&args.log)?;
    let parsed = parse_event_log(&text).map_err(|e| usage(format!("{}: {e}", args.log.display())))?;
    if parsed.truncated {
        eprintln!("warning: {} ends before the game does", args.log.display());
    }
    let frames = build_frames(&parsed).map_err(|e| usage(format!("{}: {e}", args.log.display())))?;
    let bytes = export_frames(&frames.frames, &args.format).map_err(usage)?;
    match &args.out {
        Some(path) => write_output(path, bytes),
        None => io::stdout().write_all(&bytes).map_err(output_error),
    }
}

// ---------------------------------------------------------------- serve

pub fn serve(args: ServeArgs) -> CliResult {
    if args.workers == 0 {
        return Err(usage("--workers must be at least 1"));
    }
    let mut config = ServiceConfig::new(&args.data);
    config.workers = args.workers;
    config.queue = args.queue;
    if let Some(dir) = &args.static_dir {
        if !dir.is_dir() {
            return Err(usage(format!("static directory {} does not exist", dir.display())));
        }
        config.static_dir = Some(dir.clone());
    }
    let runtime_handle = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(runtime)?;
    runtime_handle.block_on(async {
        let addr = SocketAddr::new(args.host, args.port);
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| usage(format!("cannot listen on {addr}: {e}")))?;
        let bound = listener.local_addr().map_err(runtime)?;
        say!("listening on http://{bound}");
        io::stdout().flush().map_err(output_error)?;
        sim_service::serve_on(listener, config).await.map_err(runtime)
    })
}

// ---------------------------------------------------------------- smoke

pub fn smoke(args: SmokeArgs) -> CliResult {
    let binding: AgentBinding = args.endpoint.parse().map_err(usage)?;
    let timeout = Duration::from_millis(args.timeout_ms);
    let mut agents: Vec<Box<dyn Agent>> = vec![build_agent(&binding, timeout).map_err(|e| agent_error(0, e))?];
    for (seat, id) in SMOKE_OPPONENTS.iter().enumerate() {
        let opponent = AgentBinding::Builtin(id.to_string());
        agents.push(build_agent(&opponent, timeout).map_err(|e| agent_error(seat + 1, e))?);
    }
    let schema = Arc::new(BoardSchema::us_default());
    let limits = GameLimits {
        round_trip_cap: args.cap,
        ..GameLimits::default()
    };
    let mut total = 0u64;
    for game in 0..args.games {
        let seed = derive_seed(args.seed, SMOKE_STREAM, game as u64);
        let record = run_game(schema.clone(), &mut agents, seed, &limits).map_err(runtime)?;
        let faults = record.result.faults.first().copied().unwrap_or(0);
        total += faults as u64;
        say!(
            "game {}: {}; {faults} protocol fault(s) from {binding}",
            game + 1,
            describe_result(&record.result)
        );
    }
    say!("faults: {total}");
    Ok(())
}

// ---------------------------------------------------------------- agent

pub fn agent(args: AgentArgs) -> CliResult {
    let binding = match args.agent.parse::<AgentBinding>() {
        Ok(b @ AgentBinding::Builtin(_)) => b,
        Ok(other) => return Err(usage(format!("'{other}' is not a built-in agent"))),
        Err(e) => return Err(usage(e)),
    };
    let fresh = |binding: &AgentBinding| build_agent(binding, Duration::ZERO).map_err(|e| agent_error(0, e));
    let Some(addr) = args.listen else {
        let mut agent = fresh(&binding)?;
        return serve_agent(&mut *agent, io::stdin().lock(), io::stdout().lock()).map_err(runtime);
    };
    let listener = TcpListener::bind(addr).map_err(|e| usage(format!("cannot listen on {addr}: {e}")))?;
    say!("listening on {}", listener.local_addr().map_err(runtime)?);
    io::stdout().flush().map_err(output_error)?;
    for stream in listener.incoming() {
        let stream = stream.map_err(runtime)?;
        let binding = binding.clone();
        std::thread::spawn(move || {
            let Ok(mut agent) = fresh(&binding) else { return };
            let _ = stream.set_nodelay(true);
            let Ok(reader) = stream.try_clone() else { return };
            if let Err(e) = serve_agent(&mut *agent, BufReader::new(reader), stream) {
                eprintln!("connection closed: {e}");
            }
        });
    }
    Ok(())
}
