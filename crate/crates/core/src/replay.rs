//! Replay frames derived from an event log. Frames come from their own fold
//! over the log, independent of the engine's state type, so the engine's
//! final state can be checked against them.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::Money;
use crate::engine::{
    EventKind, GameEvent, GameState, JailExitMethod, JailReason, ParsedLog, Party, PlayerId, Termination,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FramePlayer {
    pub position: usize,
    pub cash: Money,
    pub alive: bool,
    pub in_jail: bool,
    pub round_trips: u32,
    pub novelty_signal: bool,
}

/// An owned property. Unowned properties are omitted from frames.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameProperty {
    pub name: String,
    /// First slot index carrying this property.
    pub slot: usize,
    pub owner: PlayerId,
    pub level: u8,
    pub mortgaged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameResult {
    pub winner: Option<PlayerId>,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayFrame {
    pub index: usize,
    pub turn: u64,
    /// Kind of the event that produced this frame.
    pub event: String,
    pub caption: String,
    /// Dice of the most recent roll.
    pub dice: Vec<u32>,
    pub slot_count: usize,
    pub players: Vec<FramePlayer>,
    /// Owned properties in board order.
    pub properties: Vec<FrameProperty>,
    /// Set on the game-end frame.
    pub result: Option<FrameResult>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSet {
    pub frames: Vec<ReplayFrame>,
    /// The log ended without a game-end event.
    pub truncated: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("log does not begin with game-start")]
    MissingStart,
    #[error("event {index}: {reason}")]
    Inconsistent { index: usize, reason: String },
}

/// Events that change game state get a frame; the rest (declines,
/// proposals, rejections, substitutions) only inform.
pub fn is_state_changing(kind: &EventKind) -> bool {
    !matches!(
        kind,
        EventKind::GameStart { .. }
            | EventKind::Decline { .. }
            | EventKind::TradeProposed { .. }
            | EventKind::TradeRejected { .. }
            | EventKind::InvalidActionSubstituted { .. }
    )
}

#[derive(Clone, Copy)]
struct Holding {
    owner: PlayerId,
    level: u8,
    mortgaged: bool,
}

struct Fold {
    slots: Vec<String>,
    slot_of: BTreeMap<String, usize>,
    jail: usize,
    players: Vec<FramePlayer>,
    holdings: BTreeMap<String, Holding>,
    dice: Vec<u32>,
}

impl Fold {
    fn frame(&self, index: usize, turn: u64, event: &str, caption: String, result: Option<FrameResult>) -> ReplayFrame {
        let mut properties: Vec<FrameProperty> = self
            .holdings
            .iter()
            .map(|(name, h)| FrameProperty {
                name: name.clone(),
                slot: self.slot_of.get(name).copied().unwrap_or(usize::MAX),
                owner: h.owner,
                level: h.level,
                mortgaged: h.mortgaged,
            })
            .collect();
        properties.sort_by_key(|p| p.slot);
        ReplayFrame {
            index,
            turn,
            event: event.to_string(),
            caption,
            dice: self.dice.clone(),
            slot_count: self.slots.len(),
            players: self.players.clone(),
            properties,
            result,
        }
    }

    fn player(&mut self, p: PlayerId) -> Result<&mut FramePlayer, String> {
        self.players.get_mut(p).ok_or_else(|| format!("unknown player {p}"))
    }

    fn pay(&mut self, payer: Party, payee: Party, amount: Money) -> Result<(), String> {
        if amount < 0 {
            return Err(format!("negative amount {amount}"));
        }
        if let Party::Player(p) = payer {
            let player = self.player(p)?;
            if player.cash < amount {
                return Err(format!("player {p} pays {amount} holding {}", player.cash));
            }
            player.cash -= amount;
        }
        if let Party::Player(p) = payee {
            self.player(p)?.cash += amount;
        }
        Ok(())
    }

    fn holding(&mut self, name: &str) -> Result<&mut Holding, String> {
        self.holdings.get_mut(name).ok_or_else(|| format!("{name} is not owned"))
    }

    fn step(&mut self, actor: Option<PlayerId>, kind: &EventKind) -> Result<Option<FrameResult>, String> {
        let actor = || actor.ok_or_else(|| "event needs an acting player".to_string());
        match kind {
            EventKind::Roll { dice } => self.dice = dice.clone(),
            EventKind::Move { to, .. } => {
                if *to >= self.slots.len() {
                    return Err(format!("move to {to} beyond the board"));
                }
                let p = actor()?;
                self.player(p)?.position = *to;
            }
            EventKind::PassGo {
                laps,
                payer,
                payee,
                amount,
            } => {
                self.pay(*payer, *payee, *amount)?;
                let p = actor()?;
                self.player(p)?.round_trips += laps;
            }
            EventKind::Buy {
                property,
                payer,
                payee,
                amount,
            } => {
                self.pay(*payer, *payee, *amount)?;
                let owner = payer.player().ok_or("the bank cannot buy")?;
                let fresh = Holding {
                    owner,
                    level: 0,
                    mortgaged: false,
                };
                if self.holdings.insert(property.clone(), fresh).is_some() {
                    return Err(format!("{property} bought twice"));
                }
            }
            EventKind::TradeAccepted {
                offer,
                payer,
                payee,
                amount,
            } => {
                self.pay(*payer, *payee, *amount)?;
                for name in &offer.offered {
                    self.holding(name)?.owner = offer.responder;
                }
                for name in &offer.requested {
                    self.holding(name)?.owner = offer.proposer;
                }
            }
            EventKind::Improve {
                property,
                level,
                payer,
                payee,
                amount,
            }
            | EventKind::SellImprovement {
                property,
                level,
                payer,
                payee,
                amount,
            } => {
                self.pay(*payer, *payee, *amount)?;
                self.holding(property)?.level = *level;
            }
            EventKind::Mortgage {
                property,
                payer,
                payee,
                amount,
            } => {
                self.pay(*payer, *payee, *amount)?;
                self.holding(property)?.mortgaged = true;
            }
            EventKind::Unmortgage {
                property,
                payer,
                payee,
                amount,
            } => {
                self.pay(*payer, *payee, *amount)?;
                self.holding(property)?.mortgaged = false;
            }
            EventKind::JailEnter { .. } => {
                let jail = self.jail;
                let player = self.player(actor()?)?;
                player.position = jail;
                player.in_jail = true;
            }
            EventKind::JailExit { payer, payee, amount, .. } => {
                self.pay(*payer, *payee, *amount)?;
                let p = actor()?;
                self.player(p)?.in_jail = false;
            }
            EventKind::Bankruptcy {
                creditor,
                properties,
                payer,
                payee,
                amount,
                ..
            } => {
                self.pay(*payer, *payee, *amount)?;
                for name in properties {
                    match creditor {
                        Party::Player(c) => self.holding(name)?.owner = *c,
                        Party::Bank => {
                            self.holdings.remove(name);
                        }
                    }
                }
                let p = actor()?;
                let player = self.player(p)?;
                player.alive = false;
                player.in_jail = false;
            }
            EventKind::NoveltySignal => {
                let p = actor()?;
                self.player(p)?.novelty_signal = true;
            }
            EventKind::GameEnd { winner, termination } => {
                return Ok(Some(FrameResult {
                    winner: *winner,
                    termination: *termination,
                }));
            }
            EventKind::RentPaid { payer, payee, amount, .. }
            | EventKind::TaxPaid { payer, payee, amount, .. }
            | EventKind::CardEffect { payer, payee, amount, .. } => self.pay(*payer, *payee, *amount)?,
            EventKind::JailStay { .. }
            | EventKind::CardDrawn { .. }
            | EventKind::GameStart { .. }
            | EventKind::Decline { .. }
            | EventKind::TradeProposed { .. }
            | EventKind::TradeRejected { .. }
            | EventKind::InvalidActionSubstituted { .. } => {}
        }
        Ok(None)
    }

    fn slot_name(&self, index: usize) -> &str {
        self.slots.get(index).map_or("?", String::as_str)
    }
}

fn party(p: Party) -> String {
    match p {
        Party::Bank => "the bank".into(),
        Party::Player(p) => format!("P{p}"),
    }
}

fn caption(fold: &Fold, event: &GameEvent) -> String {
    let who = event.player.map_or_else(|| "Engine".to_string(), |p| format!("P{p}"));
    match &event.kind {
        EventKind::GameStart { seats, slots, .. } => {
            format!("Game starts: {} players on {} slots", seats.len(), slots.len())
        }
        EventKind::Roll { dice } => {
            let faces: Vec<String> = dice.iter().map(u32::to_string).collect();
            format!("{who} rolls {}", faces.join(" + "))
        }
        EventKind::Move { from, to } => {
            format!("{who} moves from {} to {} ({})", from, to, fold.slot_name(*to))
        }
        EventKind::PassGo { amount, .. } => format!("{who} passes Go and collects {amount}"),
        EventKind::Buy { property, amount, .. } => format!("{who} buys {property} for {amount}"),
        EventKind::RentPaid {
            property,
            payee,
            amount,
            ..
        } => format!("{who} pays {amount} rent to {} for {property}", party(*payee)),
        EventKind::TaxPaid { slot, amount, .. } => format!("{who} pays {amount} at {slot}"),
        EventKind::CardDrawn { deck, text, .. } => format!("{who} draws {deck}: {text}"),
        EventKind::CardEffect {
            payer, payee, amount, ..
        } => format!("{} pays {amount} to {}", party(*payer), party(*payee)),
        EventKind::TradeAccepted { offer, amount, .. } => format!(
            "P{} and P{} trade [{}] for [{}] with {amount} changing hands",
            offer.proposer,
            offer.responder,
            offer.offered.join(", "),
            offer.requested.join(", ")
        ),
        EventKind::Improve {
            property,
            level,
            amount,
            ..
        } => format!("{who} improves {property} to level {level} for {amount}"),
        EventKind::SellImprovement {
            property,
            level,
            amount,
            ..
        } => format!("{who} sells an improvement on {property} (now level {level}) for {amount}"),
        EventKind::Mortgage { property, amount, .. } => format!("{who} mortgages {property} for {amount}"),
        EventKind::Unmortgage { property, amount, .. } => format!("{who} lifts the mortgage on {property} for {amount}"),
        EventKind::JailEnter { reason } => format!(
            "{who} goes to jail ({})",
            match reason {
                JailReason::GoToJailSlot => "go-to-jail slot",
                JailReason::Card => "card",
                JailReason::RepeatedDoubles => "three doubles",
            }
        ),
        EventKind::JailStay { jail_turns } => format!("{who} stays in jail (attempt {jail_turns})"),
        EventKind::JailExit { method, amount, .. } => match method {
            JailExitMethod::Fine => format!("{who} pays {amount} to leave jail"),
            JailExitMethod::ForcedFine => format!("{who} must pay {amount} to leave jail"),
            JailExitMethod::Card => format!("{who} uses a card to leave jail"),
            JailExitMethod::Doubles => format!("{who} rolls doubles and leaves jail"),
        },
        EventKind::Bankruptcy { creditor, .. } => format!("{who} goes bankrupt to {}", party(*creditor)),
        EventKind::NoveltySignal => format!("{who} signals a novelty"),
        EventKind::GameEnd { winner, termination } => match (winner, termination) {
            (Some(w), _) => format!("Game over: P{w} wins"),
            (None, Termination::RoundTripCap) => "Game over: draw at the round-trip cap".into(),
            (None, Termination::LastPlayerStanding) => "Game over: no winner".into(),
        },
        other => format!("{who}: {}", other.label()),
    }
}

/// One initial frame, then one frame per state-changing event.
pub fn build_frames(log: &ParsedLog) -> Result<FrameSet, ReplayError> {
    let events = &log.events;
    let Some(first) = events.first() else {
        return Err(ReplayError::MissingStart);
    };
    let EventKind::GameStart {
        seats,
        starting_cash,
        slots,
        jail,
        ..
    } = &first.kind
    else {
        return Err(ReplayError::MissingStart);
    };
    let mut slot_of = BTreeMap::new();
    for (i, name) in slots.iter().enumerate() {
        slot_of.entry(name.clone()).or_insert(i);
    }
    let player = FramePlayer {
        position: 0,
        cash: *starting_cash,
        alive: true,
        in_jail: false,
        round_trips: 0,
        novelty_signal: false,
    };
    let mut fold = Fold {
        slots: slots.clone(),
        slot_of,
        jail: *jail,
        players: vec![player; seats.len()],
        holdings: BTreeMap::new(),
        dice: Vec::new(),
    };
    let mut frames = vec![fold.frame(0, first.turn, first.kind.label(), caption(&fold, first), None)];
    let mut ended = false;
    for (index, event) in events.iter().enumerate().skip(1) {
        if !is_state_changing(&event.kind) {
            continue;
        }
        let result = fold
            .step(event.player, &event.kind)
            .map_err(|reason| ReplayError::Inconsistent { index, reason })?;
        ended |= result.is_some();
        let text = caption(&fold, event);
        frames.push(fold.frame(frames.len(), event.turn, event.kind.label(), text, result));
    }
    Ok(FrameSet {
        frames,
        truncated: log.truncated || !ended,
    })
}

/// Differences between a frame and an engine state, one line each.
pub fn frame_differences(frame: &ReplayFrame, state: &GameState) -> Vec<String> {
    let mut out = Vec::new();
    if frame.players.len() != state.players.len() {
        out.push(format!("{} players in frame, {} in state", frame.players.len(), state.players.len()));
    }
    for (seat, (f, s)) in frame.players.iter().zip(&state.players).enumerate() {
        let expected = FramePlayer {
            position: s.position,
            cash: s.cash,
            alive: s.alive,
            in_jail: s.in_jail,
            round_trips: s.round_trips,
            novelty_signal: s.novelty_signaled,
        };
        if *f != expected {
            out.push(format!("P{seat}: frame {f:?}, state {expected:?}"));
        }
    }
    let owned: BTreeMap<&str, (PlayerId, u8, bool)> = state
        .properties
        .iter()
        .filter_map(|(name, p)| p.owner.map(|o| (name.as_str(), (o, p.level, p.mortgaged))))
        .collect();
    let shown: BTreeMap<&str, (PlayerId, u8, bool)> = frame
        .properties
        .iter()
        .map(|p| (p.name.as_str(), (p.owner, p.level, p.mortgaged)))
        .collect();
    if owned != shown {
        out.push(format!("holdings differ: frame {shown:?}, state {owned:?}"));
    }
    if frame.dice != state.last_roll {
        out.push(format!("dice: frame {:?}, state {:?}", frame.dice, state.last_roll));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    /// One JSON frame per line.
    Ndjson,
    /// Plain-text snapshot per frame, separated by blank lines.
    Snapshots,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExportError {
    #[error("unknown export format '{0}' (expected ndjson or snapshots)")]
    UnknownFormat(String),
    #[error("no frames to export")]
    Empty,
}

impl FromStr for ExportFormat {
    type Err = ExportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ndjson" => Ok(ExportFormat::Ndjson),
            "snapshots" => Ok(ExportFormat::Snapshots),
            other => Err(ExportError::UnknownFormat(other.to_string())),
        }
    }
}

/// Serializes frames in the named format.
pub fn export_frames(frames: &[ReplayFrame], format: &str) -> Result<Vec<u8>, ExportError> {
    let format: ExportFormat = format.parse()?;
    if frames.is_empty() {
        return Err(ExportError::Empty);
    }
    let mut out = String::new();
    match format {
        ExportFormat::Ndjson => {
            for frame in frames {
                out.push_str(&serde_json::to_string(frame).expect("frame serializes"));
                out.push('\n');
            }
        }
        ExportFormat::Snapshots => {
            for (i, frame) in frames.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                write_snapshot(&mut out, frame);
            }
        }
    }
    Ok(out.into_bytes())
}

fn write_snapshot(out: &mut String, frame: &ReplayFrame) {
    let _ = writeln!(out, "=== frame {} turn {} [{}]", frame.index, frame.turn, frame.event);
    let _ = writeln!(out, "{}", frame.caption);
    if !frame.dice.is_empty() {
        let faces: Vec<String> = frame.dice.iter().map(u32::to_string).collect();
        let _ = writeln!(out, "dice {}", faces.join(" "));
    }
    for (seat, p) in frame.players.iter().enumerate() {
        let status = match (p.alive, p.in_jail) {
            (false, _) => "out",
            (true, true) => "jail",
            (true, false) => "in",
        };
        let _ = writeln!(
            out,
            "P{seat} slot {}/{} cash {} laps {} {status}",
            p.position, frame.slot_count, p.cash, p.round_trips
        );
    }
    for prop in &frame.properties {
        let m = if prop.mortgaged { " mortgaged" } else { "" };
        let _ = writeln!(out, "  {} @{} P{} level {}{m}", prop.name, prop.slot, prop.owner, prop.level);
    }
    if let Some(r) = &frame.result {
        let w = r.winner.map_or_else(|| "none".into(), |w| format!("P{w}"));
        let _ = writeln!(out, "result winner {w}");
    }
}

#[derive(Debug, Error)]
#[error("frame stream line {line}: {message}")]
pub struct FrameParseError {
    pub line: usize,
    pub message: String,
}

/// Parses an ndjson frame stream.
pub fn parse_frames(text: &str) -> Result<Vec<ReplayFrame>, FrameParseError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| FrameParseError {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}
