//! Tournaments: a fixed sequence of games among the same four agents, with
//! a novelty injected from game `k` onward, plus the metrics computed over
//! the outcomes and their aggregation across repeated tournaments.

use std::io;
use std::sync::Arc;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Discrete, Hypergeometric, Normal};
use thiserror::Error;

use crate::agents::{build_agent, Agent, AgentBinding, AgentError};
use crate::board::{canonical_json, validate_schema, BoardSchema, Violation};
use crate::engine::{run_game_with_detection, GameError, GameLimits, GameRecord, PlayerId, Termination, SEATS};
use crate::novelty::{apply_novelty, sample_instance, InjectionError, NoveltyInstance, NoveltySpec};

const GAME_STREAM: u64 = 1;
const NOVELTY_STREAM: u64 = 2;
const ONSET_STREAM: u64 = 3;

/// Mixes a master seed, a stream tag and an index into an independent seed.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03) ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    for _ in 0..2 {
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

fn default_window() -> f64 {
    0.2
}

fn default_cap() -> u32 {
    GameLimits::default().round_trip_cap
}

fn default_timeout() -> u64 {
    crate::protocol::DEFAULT_TIMEOUT.as_millis() as u64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TournamentConfig {
    /// Total games, N.
    pub games: u32,
    /// 1-based index of the first game with the novelty, k.
    pub onset: u32,
    pub novelty: NoveltySpec,
    /// One binding per seat, in seat order. Bindings may repeat.
    pub agents: Vec<AgentBinding>,
    /// Base board; the US layout when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub board: Option<BoardSchema>,
    pub seed: u64,
    /// Share of post-onset games, counted from the end, that make up the
    /// asymptotic window.
    #[serde(default = "default_window")]
    pub window_fraction: f64,
    #[serde(default = "default_cap")]
    pub round_trip_cap: u32,
    /// When nonzero, the onset is drawn per tournament from
    /// `onset ± onset_jitter`, clamped to `1..=games`.
    #[serde(default)]
    pub onset_jitter: u32,
    #[serde(default = "default_timeout")]
    pub agent_timeout_ms: u64,
}

impl TournamentConfig {
    pub fn new(games: u32, onset: u32, novelty: NoveltySpec, agents: Vec<AgentBinding>, seed: u64) -> Self {
        TournamentConfig {
            games,
            onset,
            novelty,
            agents,
            board: None,
            seed,
            window_fraction: default_window(),
            round_trip_cap: default_cap(),
            onset_jitter: 0,
            agent_timeout_ms: default_timeout(),
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut bad = |subject: &str, rule: String| {
            out.push(Violation {
                subject: subject.into(),
                rule,
            })
        };
        if self.games == 0 {
            bad("games", "a tournament needs at least one game".into());
        }
        if self.onset == 0 || self.onset > self.games {
            bad("onset", format!("must satisfy 1 <= onset <= games ({})", self.games));
        }
        if self.agents.len() != SEATS {
            bad("agents", format!("need exactly {SEATS} bindings, got {}", self.agents.len()));
        }
        if !(self.window_fraction > 0.0 && self.window_fraction <= 1.0) {
            bad("window_fraction", "must lie in (0, 1]".into());
        }
        if self.round_trip_cap == 0 {
            bad("round_trip_cap", "must be positive".into());
        }
        if let Some(board) = &self.board {
            for v in validate_schema(board) {
                bad("board", v.to_string());
            }
        }
        for v in self.novelty.violations() {
            bad("novelty", v.to_string());
        }
        out
    }

    pub fn base_board(&self) -> BoardSchema {
        self.board.clone().unwrap_or_else(BoardSchema::us_default)
    }

    pub fn limits(&self) -> GameLimits {
        GameLimits {
            round_trip_cap: self.round_trip_cap,
            ..GameLimits::default()
        }
    }

    /// The onset actually used, after jitter.
    pub fn effective_onset(&self) -> u32 {
        if self.onset_jitter == 0 {
            return self.onset;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, ONSET_STREAM, 0));
        let low = self.onset.saturating_sub(self.onset_jitter).max(1);
        let high = self.onset.saturating_add(self.onset_jitter).min(self.games).max(low);
        rng.random_range(low..=high)
    }

    /// Seed of game `game` (1-based).
    pub fn game_seed(&self, game: u32) -> u64 {
        derive_seed(self.seed, GAME_STREAM, game as u64)
    }

    /// The instance injected into game `game`, or `None` before the onset.
    pub fn instance_for(&self, game: u32) -> Option<NoveltyInstance> {
        if game < self.effective_onset() {
            return None;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, NOVELTY_STREAM, game as u64));
        Some(sample_instance(&self.novelty, &mut rng, game))
    }

    /// The same config with a seed derived for repetition `rep`.
    pub fn repetition(&self, rep: u32) -> Self {
        TournamentConfig {
            seed: derive_seed(self.seed, 0, rep as u64),
            ..self.clone()
        }
    }
}

#[derive(Debug, Error)]
pub enum TournamentError {
    #[error("invalid tournament config: {}", join(.0))]
    Config(Vec<Violation>),
    #[error("seat {seat}: {source}")]
    Agent {
        seat: usize,
        #[source]
        source: AgentError,
    },
    #[error("game {game}: {source}")]
    Injection {
        game: u32,
        #[source]
        source: InjectionError,
    },
    #[error("game {game}: {source}")]
    Game {
        game: u32,
        #[source]
        source: GameError,
    },
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Pre,
    Post,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameRow {
    /// 1-based.
    pub game: u32,
    pub phase: Phase,
    pub seed: u64,
    /// Instance id; absent before the onset.
    pub novelty_instance: Option<String>,
    pub winner: Option<PlayerId>,
    pub termination: Termination,
    pub round_trips: u32,
    /// Per seat: whether its (latched) novelty signal is on in this game.
    pub detection: Vec<bool>,
    pub faults: Vec<u32>,
}

/// Relative change in percent, or a percentage-point change when the
/// baseline is zero (`absolute`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reaction {
    pub value: f64,
    pub absolute: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionStats {
    pub detected: bool,
    pub detection_game: Option<u32>,
    /// Games from the onset to the first signal; negative for early alarms.
    pub latency: Option<i64>,
    pub false_alarm: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeatMetrics {
    pub seat: PlayerId,
    pub agent: String,
    pub pre_win_ratio: Option<f64>,
    pub post_win_ratio: Option<f64>,
    pub asymptotic_win_ratio: Option<f64>,
    pub reaction: Option<Reaction>,
    pub detection: DetectionStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TournamentReport {
    pub games: u32,
    pub onset: u32,
    pub seed: u64,
    pub novelty_id: String,
    pub window_fraction: f64,
    pub round_trip_cap: u32,
    pub agents: Vec<String>,
    pub rows: Vec<GameRow>,
    pub metrics: Vec<SeatMetrics>,
}

impl TournamentReport {
    pub fn to_json(&self) -> String {
        canonical_json(&serde_json::to_value(self).expect("report serializes"))
    }

    pub fn winners(&self, phase: Phase) -> Vec<Option<PlayerId>> {
        self.rows.iter().filter(|r| r.phase == phase).map(|r| r.winner).collect()
    }

    /// One CSV row per game.
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![
            "game".to_string(),
            "phase".into(),
            "seed".into(),
            "novelty_instance".into(),
            "winner".into(),
            "termination".into(),
            "round_trips".into(),
        ];
        header.extend((0..SEATS).map(|s| format!("detected_{s}")));
        header.extend((0..SEATS).map(|s| format!("faults_{s}")));
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![
                row.game.to_string(),
                match row.phase {
                    Phase::Pre => "pre".into(),
                    Phase::Post => "post".into(),
                },
                row.seed.to_string(),
                row.novelty_instance.clone().unwrap_or_default(),
                row.winner.map(|w| w.to_string()).unwrap_or_default(),
                match row.termination {
                    Termination::LastPlayerStanding => "last-player-standing".into(),
                    Termination::RoundTripCap => "round-trip-cap".into(),
                },
                row.round_trips.to_string(),
            ];
            rec.extend(row.detection.iter().map(|d| u8::from(*d).to_string()));
            rec.extend(row.faults.iter().map(|f| f.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// Builds the agents from the config bindings and runs the tournament.
pub fn run_tournament(config: &TournamentConfig) -> Result<TournamentReport, TournamentError> {
    check_config(config)?;
    let timeout = Duration::from_millis(config.agent_timeout_ms);
    let mut agents = Vec::with_capacity(SEATS);
    for (seat, binding) in config.agents.iter().enumerate() {
        agents.push(build_agent(binding, timeout).map_err(|source| TournamentError::Agent { seat, source })?);
    }
    run_tournament_with(config, &mut agents, |_, _| {})
}

fn check_config(config: &TournamentConfig) -> Result<(), TournamentError> {
    let problems = config.violations();
    if problems.is_empty() {
        Ok(())
    } else {
        Err(TournamentError::Config(problems))
    }
}

/// Runs the tournament with agents the caller built. `on_game` sees every
/// finished game, e.g. to store its log.
pub fn run_tournament_with(
    config: &TournamentConfig,
    agents: &mut [Box<dyn Agent>],
    mut on_game: impl FnMut(&GameRow, &GameRecord),
) -> Result<TournamentReport, TournamentError> {
    check_config(config)?;
    let base = Arc::new(config.base_board());
    let limits = config.limits();
    let onset = config.effective_onset();
    let mut latched = vec![false; SEATS];
    let mut rows = Vec::with_capacity(config.games as usize);
    for game in 1..=config.games {
        let instance = config.instance_for(game);
        let (schema, game_limits) = match &instance {
            None => (base.clone(), limits.clone()),
            Some(inst) => {
                let (schema, l) = apply_novelty(&base, &limits, inst)
                    .map_err(|source| TournamentError::Injection { game, source })?;
                (Arc::new(schema), l)
            }
        };
        let seed = config.game_seed(game);
        let record = run_game_with_detection(schema, agents, seed, &game_limits, &latched)
            .map_err(|source| TournamentError::Game { game, source })?;
        for (l, s) in latched.iter_mut().zip(&record.result.novelty_signals) {
            *l |= *s;
        }
        let row = GameRow {
            game,
            phase: if instance.is_some() { Phase::Post } else { Phase::Pre },
            seed,
            novelty_instance: instance.as_ref().map(NoveltyInstance::id),
            winner: record.result.winner,
            termination: record.result.termination,
            round_trips: record.result.round_trips.iter().copied().max().unwrap_or(0),
            detection: record.result.novelty_signals.clone(),
            faults: record.result.faults.clone(),
        };
        on_game(&row, &record);
        rows.push(row);
    }
    let mut report = TournamentReport {
        games: config.games,
        onset,
        seed: config.seed,
        novelty_id: config.novelty.id().to_string(),
        window_fraction: config.window_fraction,
        round_trip_cap: config.round_trip_cap,
        agents: config.agents.iter().map(ToString::to_string).collect(),
        rows,
        metrics: Vec::new(),
    };
    report.metrics = (0..SEATS).map(|seat| seat_metrics(&report, seat)).collect();
    Ok(report)
}

fn seat_metrics(report: &TournamentReport, seat: PlayerId) -> SeatMetrics {
    let pre = win_ratio(&report.winners(Phase::Pre), seat);
    let post = win_ratio(&report.winners(Phase::Post), seat);
    SeatMetrics {
        seat,
        agent: report.agents.get(seat).cloned().unwrap_or_default(),
        pre_win_ratio: pre,
        post_win_ratio: post,
        asymptotic_win_ratio: asymptotic_win_ratio(report, seat),
        reaction: reaction_delta(pre, post),
        detection: detection_stats(report, seat, report.onset),
    }
}

/// Fraction of `winners` equal to `seat`; draws count as non-wins. `None`
/// for an empty list.
pub fn win_ratio(winners: &[Option<PlayerId>], seat: PlayerId) -> Option<f64> {
    if winners.is_empty() {
        return None;
    }
    let wins = winners.iter().filter(|w| **w == Some(seat)).count();
    Some(wins as f64 / winners.len() as f64)
}

/// Number of trailing post-onset games in the asymptotic window.
pub fn asymptotic_window(post_games: usize, fraction: f64) -> usize {
    if post_games == 0 || !(fraction > 0.0) {
        return 0;
    }
    // Products such as 0.2 * 30 land a hair above the integer.
    let raw = (fraction.min(1.0) * post_games as f64 - 1e-9).ceil();
    (raw.max(1.0) as usize).min(post_games)
}

/// Win ratio over the final window of the post-onset phase.
pub fn asymptotic_win_ratio(report: &TournamentReport, seat: PlayerId) -> Option<f64> {
    let post = report.winners(Phase::Post);
    let window = asymptotic_window(post.len(), report.window_fraction);
    if window == 0 {
        return None;
    }
    win_ratio(&post[post.len() - window..], seat)
}

pub fn reaction_delta(pre: Option<f64>, post: Option<f64>) -> Option<Reaction> {
    let (pre, post) = (pre?, post?);
    Some(if pre > 0.0 {
        Reaction {
            value: 100.0 * (post - pre) / pre,
            absolute: false,
        }
    } else {
        Reaction {
            value: 100.0 * (post - pre),
            absolute: true,
        }
    })
}

pub fn detection_stats(report: &TournamentReport, seat: PlayerId, onset: u32) -> DetectionStats {
    let first = report
        .rows
        .iter()
        .find(|r| r.detection.get(seat).copied().unwrap_or(false))
        .map(|r| r.game);
    DetectionStats {
        detected: first.is_some(),
        detection_game: first,
        latency: first.map(|g| g as i64 - onset as i64),
        false_alarm: first.is_some_and(|g| g < onset),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignificanceTest {
    /// Pooled two-proportion z-test.
    #[default]
    TwoProportionZ,
    /// Fisher's exact test on the 2x2 table.
    FisherExact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Significance {
    pub test: SignificanceTest,
    pub pre_wins: u64,
    pub pre_games: u64,
    pub post_wins: u64,
    pub post_games: u64,
    /// z for the z-test; absent for the exact test.
    pub statistic: Option<f64>,
    /// Two-sided; absent when either phase has no games.
    pub p_value: Option<f64>,
}

/// Two-sided test of equal win proportions in two samples.
pub fn proportion_test(test: SignificanceTest, x1: u64, n1: u64, x2: u64, n2: u64) -> Significance {
    let mut out = Significance {
        test,
        pre_wins: x1,
        pre_games: n1,
        post_wins: x2,
        post_games: n2,
        statistic: None,
        p_value: None,
    };
    if n1 == 0 || n2 == 0 {
        return out;
    }
    match test {
        SignificanceTest::TwoProportionZ => {
            let (p1, p2) = (x1 as f64 / n1 as f64, x2 as f64 / n2 as f64);
            let pooled = (x1 + x2) as f64 / (n1 + n2) as f64;
            let var = pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64);
            if var <= 0.0 {
                out.statistic = Some(0.0);
                out.p_value = Some(1.0);
            } else {
                let z = (p1 - p2) / var.sqrt();
                let normal = Normal::standard();
                out.statistic = Some(z);
                out.p_value = Some((2.0 * (1.0 - normal.cdf(z.abs()))).min(1.0));
            }
        }
        SignificanceTest::FisherExact => {
            let dist = Hypergeometric::new(n1 + n2, x1 + x2, n1).expect("table margins are consistent");
            let observed = dist.pmf(x1);
            let low = (x1 + x2).saturating_sub(n2);
            let high = (x1 + x2).min(n1);
            let p: f64 = (low..=high)
                .map(|k| dist.pmf(k))
                .filter(|&p| p <= observed * (1.0 + 1e-7))
                .sum();
            out.p_value = Some(p.min(1.0));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    /// Tournaments in which the metric was defined.
    pub n: usize,
    pub mean: Option<f64>,
    /// Sample standard deviation over the square root of n; absent below
    /// two values.
    pub standard_error: Option<f64>,
}

impl MetricSummary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        let mean = (n > 0).then(|| values.iter().sum::<f64>() / n as f64);
        let standard_error = mean.filter(|_| n >= 2).map(|m| {
            let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        });
        MetricSummary {
            n,
            mean,
            standard_error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeatSummary {
    pub seat: PlayerId,
    pub agent: String,
    pub pre_win_ratio: MetricSummary,
    pub post_win_ratio: MetricSummary,
    pub asymptotic_win_ratio: MetricSummary,
    /// Relative reactions only; tournaments with a zero baseline are
    /// summarized separately in `absolute_reaction`.
    pub reaction: MetricSummary,
    pub absolute_reaction: MetricSummary,
    pub detection_rate: MetricSummary,
    pub latency: MetricSummary,
    pub false_alarm_rate: MetricSummary,
    pub significance: Significance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TournamentSummary {
    pub tournaments: usize,
    pub novelty_id: String,
    pub games: u32,
    pub onsets: Vec<u32>,
    pub seats: Vec<SeatSummary>,
}

impl TournamentSummary {
    pub fn to_json(&self) -> String {
        canonical_json(&serde_json::to_value(self).expect("summary serializes"))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum AggregateError {
    #[error("no reports to aggregate")]
    Empty,
    #[error("reports differ in {0}")]
    Heterogeneous(&'static str),
}

/// Per-seat means and standard errors across tournaments, plus a test of
/// pre- against post-onset win proportions pooled over all games.
pub fn aggregate(reports: &[TournamentReport], test: SignificanceTest) -> Result<TournamentSummary, AggregateError> {
    let first = reports.first().ok_or(AggregateError::Empty)?;
    for r in reports {
        if r.novelty_id != first.novelty_id {
            return Err(AggregateError::Heterogeneous("novelty"));
        }
        if r.games != first.games {
            return Err(AggregateError::Heterogeneous("game count"));
        }
        if r.agents != first.agents {
            return Err(AggregateError::Heterogeneous("agents"));
        }
    }
    let seats = (0..first.agents.len())
        .map(|seat| {
            let metric = |f: &dyn Fn(&SeatMetrics) -> Option<f64>| {
                let values: Vec<f64> = reports.iter().filter_map(|r| r.metrics.get(seat).and_then(f)).collect();
                MetricSummary::of(&values)
            };
            let count = |phase: Phase| -> (u64, u64) {
                reports.iter().fold((0, 0), |(w, n), r| {
                    let winners = r.winners(phase);
                    let wins = winners.iter().filter(|w| **w == Some(seat)).count() as u64;
                    (w + wins, n + winners.len() as u64)
                })
            };
            let (x1, n1) = count(Phase::Pre);
            let (x2, n2) = count(Phase::Post);
            SeatSummary {
                seat,
                agent: first.agents[seat].clone(),
                pre_win_ratio: metric(&|m| m.pre_win_ratio),
                post_win_ratio: metric(&|m| m.post_win_ratio),
                asymptotic_win_ratio: metric(&|m| m.asymptotic_win_ratio),
                reaction: metric(&|m| m.reaction.filter(|r| !r.absolute).map(|r| r.value)),
                absolute_reaction: metric(&|m| m.reaction.filter(|r| r.absolute).map(|r| r.value)),
                detection_rate: metric(&|m| Some(f64::from(u8::from(m.detection.detected)))),
                latency: metric(&|m| m.detection.latency.map(|l| l as f64)),
                false_alarm_rate: metric(&|m| Some(f64::from(u8::from(m.detection.false_alarm)))),
                significance: proportion_test(test, x1, n1, x2, n2),
            }
        })
        .collect();
    Ok(TournamentSummary {
        tournaments: reports.len(),
        novelty_id: first.novelty_id.clone(),
        games: first.games,
        onsets: reports.iter().map(|r| r.onset).collect(),
        seats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::novelty::{enumerate_library, find_spec};

    fn spec() -> NoveltySpec {
        find_spec(&enumerate_library(), "dice-count-3-to-5").unwrap().clone()
    }

    fn config(games: u32, onset: u32) -> TournamentConfig {
        let agents = ["simple", "h1", "h2", "hybrid"].map(|a| a.parse().unwrap()).to_vec();
        TournamentConfig::new(games, onset, spec(), agents, 42)
    }

    #[test]
    fn seeds_depend_on_master_and_index() {
        let c = config(40, 10);
        assert_ne!(c.game_seed(1), c.game_seed(2));
        assert_eq!(c.game_seed(5), config(40, 10).game_seed(5));
        assert_ne!(c.game_seed(5), c.repetition(1).game_seed(5));
    }

    #[test]
    fn instances_only_from_onset() {
        let c = config(40, 10);
        assert!((1..10).all(|g| c.instance_for(g).is_none()));
        assert!((10..=40).all(|g| c.instance_for(g).is_some_and(|i| i.game_index == g)));
    }

    #[test]
    fn jitter_stays_in_band() {
        let mut c = config(40, 10);
        c.onset_jitter = 2;
        for rep in 0..50 {
            let k = c.repetition(rep).effective_onset();
            assert!((8..=12).contains(&k));
        }
    }

    #[test]
    fn config_validation() {
        let c = config(10, 11);
        assert!(c.violations().iter().any(|v| v.subject == "onset"));
        let mut c = config(10, 0);
        c.agents.pop();
        c.window_fraction = 0.0;
        let subjects: Vec<_> = c.violations().into_iter().map(|v| v.subject).collect();
        assert_eq!(subjects, ["onset", "agents", "window_fraction"]);
    }

    #[test]
    fn config_document_round_trips() {
        let c = config(40, 10);
        let doc = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<TournamentConfig>(&doc).unwrap(), c);
    }

    #[test]
    fn window_sizes() {
        assert_eq!(asymptotic_window(31, 0.2), 7);
        assert_eq!(asymptotic_window(30, 0.2), 6);
        assert_eq!(asymptotic_window(31, 1.0), 31);
        assert_eq!(asymptotic_window(3, 0.01), 1);
        assert_eq!(asymptotic_window(0, 0.2), 0);
    }

    #[test]
    fn reaction_edges() {
        assert_eq!(reaction_delta(None, Some(0.2)), None);
        let r = reaction_delta(Some(0.0), Some(0.2)).unwrap();
        assert!(r.absolute);
        assert!((r.value - 20.0).abs() < 1e-12);
    }

    #[test]
    fn z_test_rejects_clear_difference() {
        let s = proportion_test(SignificanceTest::TwoProportionZ, 90, 100, 10, 100);
        assert!(s.p_value.unwrap() < 1e-6);
        let s = proportion_test(SignificanceTest::TwoProportionZ, 0, 10, 0, 10);
        assert_eq!(s.p_value, Some(1.0));
    }

    #[test]
    fn fisher_matches_textbook_table() {
        // Tea-tasting table [[3, 1], [1, 3]]: two-sided p = 34/70.
        let s = proportion_test(SignificanceTest::FisherExact, 3, 4, 1, 4);
        assert!((s.p_value.unwrap() - 34.0 / 70.0).abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn aggregate_rejects_mixed_novelties() {
        let a = TournamentReport {
            games: 2,
            onset: 1,
            seed: 0,
            novelty_id: "a".into(),
            window_fraction: 0.2,
            round_trip_cap: 500,
            agents: vec!["simple".into(); 4],
            rows: vec![],
            metrics: vec![],
        };
        let mut b = a.clone();
        b.novelty_id = "b".into();
        assert_eq!(
            aggregate(&[a.clone(), b], SignificanceTest::default()),
            Err(AggregateError::Heterogeneous("novelty"))
        );
        assert_eq!(aggregate(&[], SignificanceTest::default()), Err(AggregateError::Empty));
    }
}
