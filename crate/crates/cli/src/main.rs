//! `novelty-sim`: play games, run tournaments, inspect novelties and
//! boards, export replays, serve the HTTP API and smoke-test agents.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

mod commands;

use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "novelty-sim", version, about = "Monopoly simulator with novelty injection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Play one game and write its log, result and replay frames.
    Play(PlayArgs),
    /// Run repeated tournaments and write per-tournament reports plus a summary.
    Tournament(TournamentArgs),
    /// Inspect the novelty library or check a novelty file.
    #[command(subcommand)]
    Novelty(NoveltyCommand),
    /// Print the default board or check a board file.
    #[command(subcommand)]
    Board(BoardCommand),
    /// Turn an event log into replay frames.
    Replay(ReplayArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
    /// Play short games against an agent endpoint and count protocol faults.
    Smoke(SmokeArgs),
    /// Expose a built-in agent over the agent protocol.
    Agent(AgentArgs),
}

#[derive(Debug, clap::Args)]
pub struct PlayArgs {
    /// Game config file; flags below override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Four comma-separated agents: simple, h1, h2, hybrid, exec:CMD or tcp:HOST:PORT.
    #[arg(long, value_delimiter = ',')]
    pub agents: Vec<String>,
    /// Board schema file; the US board when absent.
    #[arg(long)]
    pub board: Option<PathBuf>,
    /// Novelty file or library name.
    #[arg(long)]
    pub novelty: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Round-trip cap.
    #[arg(long)]
    pub cap: Option<u32>,
    /// Per-decision timeout for external agents, in milliseconds.
    #[arg(long)]
    pub timeout_ms: Option<u64>,
    /// Frame export format: ndjson or snapshots.
    #[arg(long, default_value = "ndjson")]
    pub frames: String,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct TournamentArgs {
    /// Tournament config file; flags below override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of tournaments, each with its own derived seeds.
    #[arg(long, default_value_t = 1)]
    pub reps: u32,
    /// Tournaments run at once; defaults to the available cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub games: Option<u32>,
    #[arg(long)]
    pub onset: Option<u32>,
    /// Novelty file or library name.
    #[arg(long)]
    pub novelty: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub agents: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub cap: Option<u32>,
    /// Significance test for the summary: z or fisher.
    #[arg(long, default_value = "z")]
    pub test: String,
    /// Also write every game's event log.
    #[arg(long)]
    pub logs: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum NoveltyCommand {
    /// List library novelties.
    List {
        /// Only the curated demo set.
        #[arg(long)]
        demo: bool,
    },
    /// Print one novelty spec by name or id.
    Describe { key: String },
    /// Check a novelty file against the domain rules and the default board.
    Validate { path: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum BoardCommand {
    /// Print the default board schema.
    Default,
    /// Check a board schema file.
    Validate { path: PathBuf },
}

#[derive(Debug, clap::Args)]
pub struct ReplayArgs {
    /// Event log file.
    pub log: PathBuf,
    /// ndjson or snapshots.
    #[arg(long, default_value = "ndjson")]
    pub format: String,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
    /// 0 picks a free port; the bound address is printed either way.
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Directory of static files served at `/`.
    #[arg(long = "static")]
    pub static_dir: Option<PathBuf>,
    /// Where run artifacts are written.
    #[arg(long, default_value = "service-data")]
    pub data: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub workers: usize,
    #[arg(long, default_value_t = 16)]
    pub queue: usize,
}

#[derive(Debug, clap::Args)]
pub struct SmokeArgs {
    /// Agent under test, e.g. tcp:127.0.0.1:9000 or exec:./my-agent.
    pub endpoint: String,
    #[arg(long, default_value_t = 1)]
    pub games: u32,
    #[arg(long, default_value_t = 100)]
    pub cap: u32,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub timeout_ms: u64,
}

#[derive(Debug, clap::Args)]
pub struct AgentArgs {
    /// Built-in agent id.
    pub agent: String,
    /// Listen for TCP connections instead of using standard streams.
    #[arg(long)]
    pub listen: Option<SocketAddr>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Play(args) => commands::play(args),
        Command::Tournament(args) => commands::tournament(args),
        Command::Novelty(cmd) => commands::novelty(cmd),
        Command::Board(cmd) => commands::board(cmd),
        Command::Replay(args) => commands::replay(args),
        Command::Serve(args) => commands::serve(args),
        Command::Smoke(args) => commands::smoke(args),
        Command::Agent(args) => commands::agent(args),
    };
    match outcome {
        Ok(()) | Err(commands::CliError::OutputClosed) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
