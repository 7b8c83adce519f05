//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::panic;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use novelty_board::agents::{
    build_agent, ActionKind, Agent, AgentAction, AgentBinding, AgentFault, DecisionRequest,
};
use novelty_board::board::{validate_schema, BoardSchema, Deck, DiceConfig, SlotKind};
use novelty_board::engine::rules::improvement_cost;
use novelty_board::engine::{
    parse_event_log, roll_dice, run_game, Board, EventKind, GameLimits, GameState, Party, PlayerId, Termination,
};
use novelty_board::novelty::{
    apply_novelty, enumerate_library, find_spec, sample_instance, NoveltyInstance, NoveltyParams, NoveltySpec,
};
use novelty_board::protocol::{decode, encode, Message};
use novelty_board::replay::{build_frames, frame_differences};
use novelty_board::tournament::{
    aggregate, asymptotic_win_ratio, detection_stats, proportion_test, reaction_delta, run_tournament_with,
    win_ratio, DetectionStats, GameRow, Phase, SeatMetrics, SignificanceTest, TournamentConfig, TournamentReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn library(name: &str) -> NoveltySpec {
    find_spec(&enumerate_library(), name).unwrap_or_else(|| panic!("library has {name}")).clone()
}

fn instance(spec: &NoveltySpec) -> NoveltyInstance {
    sample_instance(spec, &mut ChaCha8Rng::seed_from_u64(0), 0)
}

fn seats(ids: &[&str]) -> Vec<Box<dyn Agent>> {
    ids.iter()
        .map(|id| build_agent(&id.parse().unwrap(), Duration::from_secs(1)).unwrap())
        .collect()
}

// ---------------------------------------------------------------- dice

/// Exact sum distribution of `count` fair six-sided dice by walking every outcome.
fn enumerate_sums(count: u32) -> BTreeMap<u32, f64> {
    let total = 6u64.pow(count);
    let mut hits = BTreeMap::new();
    for outcome in 0..total {
        let mut rest = outcome;
        let mut sum = 0;
        for _ in 0..count {
            sum += (rest % 6) as u32 + 1;
            rest /= 6;
        }
        *hits.entry(sum).or_insert(0u64) += 1;
    }
    hits.into_iter().map(|(s, h)| (s, h as f64 / total as f64)).collect()
}

fn dice_probability() -> Outcome {
    let two = enumerate_sums(2);
    let three = enumerate_sums(3);
    check((two[&2] - 1.0 / 36.0).abs() < 1e-15, || format!("P(2) with 2d6 = {}", two[&2]))?;
    check(!three.contains_key(&2), || "sum 2 reachable with 3 dice".into())?;
    let mut worst: f64 = 0.0;
    for count in [2, 3] {
        let oracle = enumerate_sums(count);
        let dice = DiceConfig {
            count,
            ..DiceConfig::default()
        };
        for (s, p) in dice.sum_distribution() {
            check((p - oracle[&s]).abs() < 1e-12, || format!("{count} dice: P({s}) = {p}"))?;
        }
        let n = 1_000_000u64;
        let mut rng = ChaCha8Rng::seed_from_u64(count as u64);
        let mut hits: BTreeMap<u32, u64> = BTreeMap::new();
        for _ in 0..n {
            *hits.entry(roll_dice(&mut rng, &dice).iter().sum()).or_default() += 1;
        }
        check(hits.keys().all(|s| oracle.contains_key(s)), || format!("{count} dice: impossible sum rolled"))?;
        for (s, p) in &oracle {
            let observed = hits.get(s).copied().unwrap_or(0) as f64;
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            let z = (observed - n as f64 * p).abs() / sigma;
            worst = worst.max(z);
            check(z <= 4.0, || format!("{count} dice: sum {s} off by {z:.2} sigma"))?;
        }
    }
    Ok(format!("P(2)=1/36 with 2d6, 0 with 3d6; 10^6 rolls, worst deviation {worst:.2} sigma"))
}

// ---------------------------------------------------------------- board

fn board_constants() -> Outcome {
    let schema = BoardSchema::us_default();
    let violations = validate_schema(&schema);
    check(violations.is_empty(), || format!("default board invalid: {violations:?}"))?;
    check(schema.slot_count() == 40, || format!("{} slots", schema.slot_count()))?;
    check(schema.color_groups.len() == 8, || format!("{} color groups", schema.color_groups.len()))?;
    let chance = schema.card_decks.deck(Deck::Chance).len();
    let chest = schema.card_decks.deck(Deck::CommunityChest).len();
    check(chance == 16 && chest == 16, || format!("{chance}+{chest} cards"))?;
    check(schema.go_increment == 200, || format!("go increment {}", schema.go_increment))?;
    let income = schema.slot_by_name("Income Tax").map(|s| &s.kind);
    check(matches!(income, Some(SlotKind::Tax { amount: 200 })), || format!("income tax {income:?}"))?;
    Ok("40 slots, 8 groups, 16+16 cards, Go 200, income tax 200".into())
}

// ---------------------------------------------------------------- novelty structure

/// Most tax payments one player makes between two consecutive round-trip increments.
fn max_taxes_per_round_trip(schema: &BoardSchema, events: &[novelty_board::engine::GameEvent]) -> usize {
    let mut state = GameState::new(schema, 4);
    let mut counts: BTreeMap<(PlayerId, u32), usize> = BTreeMap::new();
    for e in events {
        state.apply(schema, e).unwrap();
        if let EventKind::TaxPaid {
            payer: Party::Player(p), ..
        } = &e.kind
        {
            *counts.entry((*p, state.players[*p].round_trips)).or_default() += 1;
        }
    }
    counts.into_values().max().unwrap_or(0)
}

fn novelty_structure() -> Outcome {
    let base = BoardSchema::us_default();
    let limits = GameLimits::default();

    let start = Instant::now();
    let (collapsed, _) = apply_novelty(&base, &limits, &instance(&library("color-collapse-keep-blue"))).unwrap();
    check(collapsed.color_groups.len() == 2, || format!("collapse left {} groups", collapsed.color_groups.len()))?;
    check(validate_schema(&collapsed).is_empty(), || "collapsed board invalid".into())?;
    let collapse_time = start.elapsed();

    let start = Instant::now();
    let (recolored, _) = apply_novelty(&base, &limits, &instance(&library("recolor-boardwalk"))).unwrap();
    let board = Board::new(Arc::new(recolored.clone()));
    let mut state = GameState::new(&recolored, 4);
    state.properties.get_mut("Boardwalk").unwrap().owner = Some(0);
    check(state.properties["Park Place"].owner.is_none(), || "Park Place owned".into())?;
    check(improvement_cost(&board, &state, 0, "Boardwalk").is_some(), || {
        "recolored Boardwalk not improvable alone".into()
    })?;
    let recolor_time = start.elapsed();

    let start = Instant::now();
    let (wide, wide_limits) = apply_novelty(&base, &limits, &instance(&library("swap-extend-both-taxes-5"))).unwrap();
    check(wide.slot_count() == 48, || format!("extended board has {} slots", wide.slot_count()))?;
    let wide = Arc::new(wide);
    let mut found = None;
    for seed in 0..50 {
        let record = run_game(wide.clone(), &mut seats(&["h1", "h2", "h1", "h2"]), seed, &wide_limits).unwrap();
        let taxes = max_taxes_per_round_trip(&wide, &record.events);
        if taxes >= 2 {
            found = Some((seed, taxes));
            break;
        }
    }
    let (seed, taxes) = found.ok_or("no seeded game paid two taxes in one round trip")?;
    let wide_time = start.elapsed();
    let budget = Duration::from_secs(5);
    for (what, t) in [("collapse", collapse_time), ("recolor", recolor_time), ("swap-extend", wide_time)] {
        check(t < budget, || format!("{what} took {t:?}"))?;
    }
    Ok(format!(
        "collapse -> 2 groups; lone Boardwalk improvable; 48 slots, seed {seed} pays {taxes} taxes in one round trip"
    ))
}

// ---------------------------------------------------------------- tournament protocol

/// Buys when it can and otherwise takes the last menu entry; games end fast.
struct Stub;

impl Agent for Stub {
    fn name(&self) -> &str {
        "stub"
    }
    fn decide(&mut self, request: &DecisionRequest) -> Result<AgentAction, AgentFault> {
        let kind = if request.menu.permits(&ActionKind::DeclareBankruptcy) {
            ActionKind::DeclareBankruptcy
        } else if request.menu.permits(&ActionKind::Buy) {
            ActionKind::Buy
        } else {
            request.menu.actions.last().cloned().unwrap_or(ActionKind::EndPhase)
        };
        Ok(kind.into())
    }
}

fn stub_seats() -> Vec<Box<dyn Agent>> {
    (0..4).map(|_| Box::new(Stub) as Box<dyn Agent>).collect()
}

fn stub_config(games: u32, onset: u32, spec: NoveltySpec, seed: u64) -> TournamentConfig {
    let agents = vec!["simple".parse::<AgentBinding>().unwrap(); 4];
    let mut c = TournamentConfig::new(games, onset, spec, agents, seed);
    c.round_trip_cap = 5;
    c
}

fn tournament_protocol() -> Outcome {
    let start = Instant::now();
    let spec = library("dice-count-3-to-5");
    let report = run_tournament_with(&stub_config(40, 10, spec.clone(), 1), &mut stub_seats(), |_, _| {}).unwrap();
    check(report.rows.len() == 40, || format!("{} rows", report.rows.len()))?;
    for row in &report.rows {
        let expected = if row.game <= 9 { Phase::Pre } else { Phase::Post };
        check(row.phase == expected, || format!("game {} tagged {:?}", row.game, row.phase))?;
        check(row.novelty_instance.is_none() == (row.game < 10), || {
            format!("game {} instance {:?}", row.game, row.novelty_instance)
        })?;
    }

    let ids: BTreeMap<String, u32> = (3..=5)
        .map(|count| {
            let inst = NoveltyInstance {
                spec_id: spec.id().to_string(),
                parameters: NoveltyParams::DiceCount { count },
                game_index: 0,
            };
            (inst.id(), count)
        })
        .collect();
    let big = run_tournament_with(&stub_config(3009, 10, spec, 2), &mut stub_seats(), |_, _| {}).unwrap();
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for row in big.rows.iter().filter(|r| r.phase == Phase::Post) {
        let id = row.novelty_instance.as_ref().ok_or("post game without instance")?;
        let count = ids.get(id).ok_or_else(|| format!("instance {id} is not a 3/4/5 dice count"))?;
        *counts.entry(*count).or_default() += 1;
    }
    let n: u64 = counts.values().sum();
    check(n == 3000, || format!("{n} post-onset instances"))?;
    let expected = n as f64 / 3.0;
    let chi2: f64 = (3..=5)
        .map(|c| (counts.get(&c).copied().unwrap_or(0) as f64 - expected).powi(2) / expected)
        .sum();
    // Two degrees of freedom: the survival function is exp(-x/2).
    let critical = 2.0 * 100f64.ln();
    check(chi2 < critical, || format!("chi-square {chi2:.3} >= {critical:.3} ({counts:?})"))?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "N=40,k=10: games 1-9 pre, 10-40 post, no pre-onset instances; dice counts {counts:?}, chi-square {chi2:.3} < {critical:.3}"
    ))
}

// ---------------------------------------------------------------- metrics

struct Table {
    games: u32,
    onset: u32,
    window: f64,
    winners: Vec<Option<PlayerId>>,
    /// First game in which seat 0 raised the novelty signal.
    detected_at: Option<u32>,
    seat: PlayerId,
    pre: Option<f64>,
    post: Option<f64>,
    asymptotic: Option<f64>,
    reaction: Option<(f64, bool)>,
    detection: DetectionStats,
}

fn report_from(games: u32, onset: u32, window: f64, winners: &[Option<PlayerId>], detected_at: Option<u32>) -> TournamentReport {
    assert_eq!(winners.len(), games as usize);
    let rows = winners
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let game = i as u32 + 1;
            GameRow {
                game,
                phase: if game < onset { Phase::Pre } else { Phase::Post },
                seed: game as u64,
                novelty_instance: (game >= onset).then(|| format!("x/{game}")),
                winner: *w,
                termination: if w.is_some() {
                    Termination::LastPlayerStanding
                } else {
                    Termination::RoundTripCap
                },
                round_trips: 100,
                detection: vec![detected_at.is_some_and(|d| game >= d), false, false, false],
                faults: vec![0; 4],
            }
        })
        .collect();
    let mut report = TournamentReport {
        games,
        onset,
        seed: 0,
        novelty_id: "x".into(),
        window_fraction: window,
        round_trip_cap: 500,
        agents: vec!["h1".into(), "h2".into(), "h1".into(), "h2".into()],
        rows,
        metrics: Vec::new(),
    };
    report.metrics = (0..4)
        .map(|seat| {
            let pre = win_ratio(&report.winners(Phase::Pre), seat);
            let post = win_ratio(&report.winners(Phase::Post), seat);
            SeatMetrics {
                seat,
                agent: report.agents[seat].clone(),
                pre_win_ratio: pre,
                post_win_ratio: post,
                asymptotic_win_ratio: asymptotic_win_ratio(&report, seat),
                reaction: reaction_delta(pre, post),
                detection: detection_stats(&report, seat, onset),
            }
        })
        .collect();
    report
}

fn w(seats: &[i8]) -> Vec<Option<PlayerId>> {
    seats.iter().map(|&s| (s >= 0).then_some(s as PlayerId)).collect()
}

fn undetected() -> DetectionStats {
    DetectionStats {
        detected: false,
        detection_game: None,
        latency: None,
        false_alarm: false,
    }
}

fn detected(game: u32, latency: i64) -> DetectionStats {
    DetectionStats {
        detected: true,
        detection_game: Some(game),
        latency: Some(latency),
        false_alarm: latency < 0,
    }
}

fn tables() -> Vec<Table> {
    let mut t7 = vec![0, 0, 0, 1, 1, 2, 2, 3, 3];
    t7.extend([0; 8]);
    t7.extend([1; 16]);
    t7.extend([0, 1, 0, 1, 1, 1, 1]);
    let mut t6 = vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
    t6.extend([2; 16]);
    t6.extend([0, 0, 1, 0]);
    vec![
        Table {
            games: 10, onset: 6, window: 0.2,
            winners: w(&[0, 0, 1, 2, 0, 0, 1, 1, 1, 1]),
            detected_at: Some(7), seat: 0,
            pre: Some(0.6), post: Some(0.2), asymptotic: Some(0.0),
            reaction: Some((-200.0 / 3.0, false)), detection: detected(7, 1),
        },
        Table {
            games: 8, onset: 5, window: 0.2,
            winners: w(&[1, 1, 2, 3, 0, 0, 1, -1]),
            detected_at: None, seat: 0,
            pre: Some(0.0), post: Some(0.5), asymptotic: Some(0.0),
            reaction: Some((50.0, true)), detection: undetected(),
        },
        Table {
            games: 6, onset: 3, window: 0.2,
            winners: w(&[-1; 6]),
            detected_at: Some(3), seat: 0,
            pre: Some(0.0), post: Some(0.0), asymptotic: Some(0.0),
            reaction: Some((0.0, true)), detection: detected(3, 0),
        },
        Table {
            games: 4, onset: 1, window: 0.2,
            winners: w(&[0, 0, 1, 0]),
            detected_at: None, seat: 0,
            pre: None, post: Some(0.75), asymptotic: Some(1.0),
            reaction: None, detection: undetected(),
        },
        Table {
            games: 8, onset: 5, window: 0.5,
            winners: w(&[0, 1, 0, 1, 0, 0, 0, 1]),
            detected_at: Some(2), seat: 0,
            pre: Some(0.5), post: Some(0.75), asymptotic: Some(0.5),
            reaction: Some((50.0, false)), detection: detected(2, -3),
        },
        Table {
            games: 30, onset: 11, window: 0.2,
            winners: w(&t6),
            detected_at: Some(30), seat: 0,
            pre: Some(0.5), post: Some(0.15), asymptotic: Some(0.75),
            reaction: Some((-70.0, false)), detection: detected(30, 19),
        },
        Table {
            games: 40, onset: 10, window: 0.2,
            winners: w(&t7),
            detected_at: Some(10), seat: 0,
            pre: Some(1.0 / 3.0), post: Some(10.0 / 31.0), asymptotic: Some(2.0 / 7.0),
            reaction: Some((-100.0 / 31.0, false)), detection: detected(10, 0),
        },
        Table {
            games: 4, onset: 3, window: 0.2,
            winners: w(&[0, 1, 0, 1]),
            detected_at: None, seat: 0,
            pre: Some(0.5), post: Some(0.5), asymptotic: Some(0.0),
            reaction: Some((0.0, false)), detection: undetected(),
        },
        Table {
            games: 8, onset: 5, window: 0.2,
            winners: w(&[1, 0, 0, 0, -1, -1, -1, 1]),
            detected_at: None, seat: 1,
            pre: Some(0.25), post: Some(0.25), asymptotic: Some(1.0),
            reaction: Some((0.0, false)), detection: undetected(),
        },
        Table {
            games: 5, onset: 2, window: 1.0,
            winners: w(&[0, 0, 1, 0, -1]),
            detected_at: Some(1), seat: 0,
            pre: Some(1.0), post: Some(0.5), asymptotic: Some(0.5),
            reaction: Some((-50.0, false)), detection: detected(1, -1),
        },
    ]
}

fn close(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => (a - b).abs() < 1e-12,
        (None, None) => true,
        _ => false,
    }
}

fn metrics() -> Outcome {
    let all = tables();
    for (i, t) in all.iter().enumerate() {
        let report = report_from(t.games, t.onset, t.window, &t.winners, t.detected_at);
        let m = &report.metrics[t.seat];
        let tag = |what: &str| format!("table {}: {what}", i + 1);
        check(close(m.pre_win_ratio, t.pre), || tag(&format!("pre {:?} != {:?}", m.pre_win_ratio, t.pre)))?;
        check(close(m.post_win_ratio, t.post), || tag(&format!("post {:?} != {:?}", m.post_win_ratio, t.post)))?;
        check(close(m.asymptotic_win_ratio, t.asymptotic), || {
            tag(&format!("asymptotic {:?} != {:?}", m.asymptotic_win_ratio, t.asymptotic))
        })?;
        let reaction = m.reaction.map(|r| (r.value, r.absolute));
        let same = match (reaction, t.reaction) {
            (Some((a, x)), Some((b, y))) => (a - b).abs() < 1e-9 && x == y,
            (None, None) => true,
            _ => false,
        };
        check(same, || tag(&format!("reaction {reaction:?} != {:?}", t.reaction)))?;
        check(m.detection == t.detection, || tag(&format!("detection {:?} != {:?}", m.detection, t.detection)))?;
    }

    let post_tables: [&[i8]; 5] = [
        &[1, 1, 1, 1, 1, 0, 0, 1, 1, 1],
        &[1, 1, 1, 1, 1, 0, 0, 0, 1, 1],
        &[1, 1, 1, 1, 1, 0, 1, 1, 1, 1],
        &[1, 1, 1, 1, 1, 0, 0, 0, 0, 0],
        &[1, 1, 1, 1, 1, 2, 0, 0, 1, 0],
    ];
    let reports: Vec<TournamentReport> =
        post_tables.iter().map(|t| report_from(10, 6, 0.2, &w(t), None)).collect();
    let summary = aggregate(&reports, SignificanceTest::TwoProportionZ).unwrap();
    let values: Vec<f64> = reports.iter().map(|r| r.metrics[0].post_win_ratio.unwrap()).collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sum_sq: f64 = values.iter().map(|v| v * v).sum();
    let textbook = ((sum_sq - n * mean * mean) / (n * (n - 1.0))).sqrt();
    let se = summary.seats[0].post_win_ratio.standard_error.ok_or("no standard error")?;
    check((se - textbook).abs() <= 1e-12, || format!("SE {se} vs textbook {textbook}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let reps = 1000;
    let mut rejected = 0;
    for _ in 0..reps {
        let x1 = (0..100).filter(|_| rng.random_bool(0.3)).count() as u64;
        let x2 = (0..100).filter(|_| rng.random_bool(0.3)).count() as u64;
        let s = proportion_test(SignificanceTest::TwoProportionZ, x1, 100, x2, 100);
        if s.p_value.unwrap() < 0.05 {
            rejected += 1;
        }
    }
    let rate = rejected as f64 / reps as f64;
    check((0.03..=0.075).contains(&rate), || format!("null rejection rate {rate}"))?;
    Ok(format!(
        "{} outcome tables match; SE {se:.6} matches textbook within 1e-12; null rejection rate {rate:.3}",
        all.len()
    ))
}

// ---------------------------------------------------------------- soundness

const MIXES: [[&str; 4]; 8] = [
    ["simple", "simple", "simple", "simple"],
    ["h1", "h2", "h1", "h2"],
    ["h2", "hybrid", "simple", "h1"],
    ["hybrid", "hybrid", "hybrid", "hybrid"],
    ["h1", "h1", "h1", "h1"],
    ["h2", "h2", "h2", "h2"],
    ["simple", "h1", "h2", "hybrid"],
    ["h1", "simple", "hybrid", "h2"],
];

fn soundness() -> Outcome {
    let start = Instant::now();
    let base = BoardSchema::us_default();
    let specs = enumerate_library();
    let mut slowest = Duration::ZERO;
    let mut by_novelty = 0;
    for game in 0..200u64 {
        let mix = MIXES[game as usize % MIXES.len()];
        let (schema, limits) = if game % 4 == 3 {
            by_novelty += 1;
            let spec = &specs[(game as usize / 4) % specs.len()];
            let inst = sample_instance(spec, &mut ChaCha8Rng::seed_from_u64(game), 0);
            apply_novelty(&base, &GameLimits::default(), &inst).map_err(|e| format!("{}: {e:?}", spec.name()))?
        } else {
            (base.clone(), GameLimits::default())
        };
        let schema = Arc::new(schema);
        let seed = 1000 + game;
        let t = Instant::now();
        let record = run_game(schema.clone(), &mut seats(&mix), seed, &limits).map_err(|e| e.to_string())?;
        slowest = slowest.max(t.elapsed());
        let tag = |what: String| format!("game {game} ({mix:?}, seed {seed}): {what}");

        let problems = common::audit_game(&schema, 4, &record.events);
        check(problems.is_empty(), || tag(problems.join("; ")))?;

        let again = run_game(schema.clone(), &mut seats(&mix), seed, &limits).map_err(|e| e.to_string())?;
        check(again.log_text() == record.log_text(), || tag("rerun log differs".into()))?;

        let parsed = parse_event_log(&record.log_text()).map_err(|e| tag(e.to_string()))?;
        let frames = build_frames(&parsed).map_err(|e| tag(e.to_string()))?;
        let last = frames.frames.last().ok_or_else(|| tag("no frames".into()))?;
        let diffs = frame_differences(last, &record.final_state);
        check(diffs.is_empty(), || tag(format!("final frame differs: {diffs:?}")))?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(300), || format!("corpus took {elapsed:?}"))?;
    check(slowest < Duration::from_secs(1), || format!("slowest game took {slowest:?}"))?;
    Ok(format!(
        "200 games ({by_novelty} on novelty boards), 8 agent mixes: conservation, determinism, frame fold, \
         bankruptcy and even-build checks clean; {:.1}s total, slowest game {:.0} ms",
        elapsed.as_secs_f64(),
        slowest.as_secs_f64() * 1000.0
    ))
}

// ---------------------------------------------------------------- termination

fn termination() -> Outcome {
    let schema = Arc::new(BoardSchema::us_default());
    let limits = GameLimits::default();
    let seatings = [
        ["h1", "h1", "h2", "h2"],
        ["h1", "h2", "h1", "h2"],
        ["h1", "h2", "h2", "h1"],
        ["h2", "h1", "h1", "h2"],
        ["h2", "h1", "h2", "h1"],
        ["h2", "h2", "h1", "h1"],
    ];
    let mut lengths = Vec::new();
    let mut total = 0;
    for (i, seating) in seatings.iter().enumerate() {
        for g in 0..40u64 {
            let seed = 50_000 + 100 * i as u64 + g;
            let record = run_game(schema.clone(), &mut seats(seating), seed, &limits).map_err(|e| e.to_string())?;
            total += 1;
            if record.result.termination == Termination::LastPlayerStanding {
                lengths.push(record.result.round_trips.iter().copied().max().unwrap_or(0));
            }
        }
    }
    lengths.sort_unstable();
    let rate = lengths.len() as f64 / total as f64;
    let median = lengths.get(lengths.len() / 2).copied().unwrap_or(0);
    let in_band = lengths.iter().filter(|&&l| (200..=500).contains(&l)).count() as f64 / lengths.len().max(1) as f64;
    let summary = format!(
        "{}/{total} H1/H2 games end by bankruptcy ({:.1}%); median {median} round trips, {:.0}% in 200-500",
        lengths.len(),
        rate * 100.0,
        in_band * 100.0
    );
    check(rate >= 0.9, || summary.clone())?;
    check((100..=600).contains(&median), || summary.clone())?;
    Ok(summary)
}

// ---------------------------------------------------------------- robustness

/// Serves one faulty agent: garbage, silence and a wrong protocol version
/// in turn, with a legal answer every fourth request. Counts the bad replies.
fn faulty_server(listener: TcpListener, bad: Arc<AtomicU64>) {
    let (stream, _) = listener.accept().unwrap();
    stream.set_nodelay(true).unwrap();
    let mut writer = stream.try_clone().unwrap();
    for line in BufReader::new(stream).lines() {
        let Ok(line) = line else { break };
        let Ok(Message::DecisionRequest { id, request }) = decode(&line) else {
            continue;
        };
        let reply = match id % 4 {
            0 => Some("}{ not json".to_string()),
            1 => None,
            2 => {
                let good = encode(&Message::ActionResponse {
                    id,
                    action: ActionKind::EndPhase.into(),
                });
                Some(good.replace("\"protocol_version\":1", "\"protocol_version\":99"))
            }
            _ => {
                let kind = request.menu.actions.first().cloned().unwrap_or(ActionKind::EndPhase);
                Some(encode(&Message::ActionResponse { id, action: kind.into() }))
            }
        };
        if id % 4 != 3 {
            bad.fetch_add(1, Ordering::SeqCst);
        }
        if let Some(reply) = reply {
            if writeln!(writer, "{reply}").is_err() {
                break;
            }
        }
    }
}

fn robustness() -> Outcome {
    let start = Instant::now();
    let listener = TcpListener::bind("127.0.0.1:0").map_err(|e| e.to_string())?;
    let address = listener.local_addr().unwrap();
    let bad = Arc::new(AtomicU64::new(0));
    let server_bad = bad.clone();
    thread::spawn(move || faulty_server(listener, server_bad));

    let binding: AgentBinding = format!("tcp:{address}").parse().map_err(|e: novelty_board::agents::AgentError| e.to_string())?;
    let mut agents = vec![build_agent(&binding, Duration::from_millis(100)).map_err(|e| e.to_string())?];
    agents.extend(seats(&["h1", "h2", "h1"]));
    let limits = GameLimits {
        round_trip_cap: 50,
        ..GameLimits::default()
    };
    let record = run_game(Arc::new(BoardSchema::us_default()), &mut agents, 77, &limits).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    check(matches!(record.events.last().map(|e| &e.kind), Some(EventKind::GameEnd { .. })), || {
        "log does not end with game-end".into()
    })?;
    let substituted = record
        .events
        .iter()
        .filter(|e| matches!(e.kind, EventKind::InvalidActionSubstituted { .. }) && e.player == Some(0))
        .count() as u64;
    let sent_bad = bad.load(Ordering::SeqCst);
    check(sent_bad > 0, || "the faulty agent was never asked".into())?;
    check(substituted == sent_bad, || format!("{sent_bad} bad replies, {substituted} substitutions logged"))?;
    check(u64::from(record.result.faults[0]) == sent_bad, || format!("result counts {} faults", record.result.faults[0]))?;
    check(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{sent_bad} garbage/timeout/version faults over TCP, all logged as substitutions; game ended ({:?}) in {:.1}s",
        record.result.termination,
        elapsed.as_secs_f64()
    ))
}

// ---------------------------------------------------------------- driver

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("dice probability", dice_probability),
        ("board constants", board_constants),
        ("novelty structure", novelty_structure),
        ("tournament protocol", tournament_protocol),
        ("metrics", metrics),
        ("engine soundness corpus", soundness),
        ("termination behavior", termination),
        ("robustness", robustness),
    ];
    panic::set_hook(Box::new(|_| {}));
    let results: Vec<(Outcome, Duration)> = criteria
        .iter()
        .map(|(_, f)| {
            let start = Instant::now();
            let outcome = panic::catch_unwind(f).unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panicked".into());
                Err(format!("panic: {msg}"))
            });
            (outcome, start.elapsed())
        })
        .collect();
    let _ = panic::take_hook();
    let mut failed = 0;
    for ((name, _), (outcome, elapsed)) in criteria.iter().zip(results) {
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name} ({secs:.1}s): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
