//! Event records and the newline-delimited log format.
//!
//! A log is one JSON object per line. Every line but the last is a
//! [`GameEvent`] (it carries an `"event"` tag); the last line is the
//! [`GameResult`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::TradeOffer;
use crate::board::{Deck, Money};

pub type PlayerId = usize;

/// Either side of a money transfer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Party {
    Bank,
    Player(PlayerId),
}

impl Party {
    pub fn player(self) -> Option<PlayerId> {
        match self {
            Party::Bank => None,
            Party::Player(p) => Some(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameEvent {
    pub turn: u64,
    /// Acting player; `None` for engine-level events.
    pub player: Option<PlayerId>,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JailReason {
    GoToJailSlot,
    Card,
    RepeatedDoubles,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JailExitMethod {
    Fine,
    Card,
    Doubles,
    ForcedFine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    LastPlayerStanding,
    RoundTripCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum EventKind {
    GameStart {
        seats: Vec<String>,
        starting_cash: Money,
        /// Slot names in board order.
        slots: Vec<String>,
        jail: usize,
        chance_order: Vec<usize>,
        community_chest_order: Vec<usize>,
    },
    Roll {
        dice: Vec<u32>,
    },
    Move {
        from: usize,
        to: usize,
    },
    PassGo {
        laps: u32,
        payer: Party,
        payee: Party,
        amount: Money,
    },
    Buy {
        property: String,
        payer: Party,
        payee: Party,
        amount: Money,
    },
    Decline {
        property: String,
    },
    RentPaid {
        property: String,
        payer: Party,
        payee: Party,
        amount: Money,
    },
    TaxPaid {
        slot: String,
        payer: Party,
        payee: Party,
        amount: Money,
    },
    CardDrawn {
        deck: Deck,
        card: usize,
        text: String,
    },
    CardEffect {
        deck: Deck,
        card: usize,
        payer: Party,
        payee: Party,
        amount: Money,
    },
    TradeProposed {
        offer: TradeOffer,
    },
    TradeAccepted {
        offer: TradeOffer,
        payer: Party,
        payee: Party,
        amount: Money,
    },
    TradeRejected {
        offer: TradeOffer,
        reason: String,
    },
    Improve {
        property: String,
        level: u8,
        payer: Party,
        payee: Party,
        amount: Money,
    },
    SellImprovement {
        property: String,
        level: u8,
        payer: Party,
        payee: Party,
        amount: Money,
    },
    Mortgage {
        property: String,
        payer: Party,
        payee: Party,
        amount: Money,
    },
    Unmortgage {
        property: String,
        payer: Party,
        payee: Party,
        amount: Money,
    },
    JailEnter {
        reason: JailReason,
    },
    /// A failed attempt to roll out of jail.
    JailStay {
        jail_turns: u8,
    },
    JailExit {
        method: JailExitMethod,
        card: Option<Deck>,
        payer: Party,
        payee: Party,
        amount: Money,
    },
    Bankruptcy {
        creditor: Party,
        properties: Vec<String>,
        returned_cards: Vec<(Deck, usize)>,
        payer: Party,
        payee: Party,
        amount: Money,
    },
    InvalidActionSubstituted {
        decision: String,
        reason: String,
        substituted: String,
    },
    NoveltySignal,
    GameEnd {
        winner: Option<PlayerId>,
        termination: Termination,
    },
}

/// Payer, payee and amount of a monetary event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transfer {
    pub payer: Party,
    pub payee: Party,
    pub amount: Money,
}

impl EventKind {
    pub fn label(&self) -> &'static str {
        match self {
            EventKind::GameStart { .. } => "game-start",
            EventKind::Roll { .. } => "roll",
            EventKind::Move { .. } => "move",
            EventKind::PassGo { .. } => "pass-go",
            EventKind::Buy { .. } => "buy",
            EventKind::Decline { .. } => "decline",
            EventKind::RentPaid { .. } => "rent-paid",
            EventKind::TaxPaid { .. } => "tax-paid",
            EventKind::CardDrawn { .. } => "card-drawn",
            EventKind::CardEffect { .. } => "card-effect",
            EventKind::TradeProposed { .. } => "trade-proposed",
            EventKind::TradeAccepted { .. } => "trade-accepted",
            EventKind::TradeRejected { .. } => "trade-rejected",
            EventKind::Improve { .. } => "improve",
            EventKind::SellImprovement { .. } => "sell-improvement",
            EventKind::Mortgage { .. } => "mortgage",
            EventKind::Unmortgage { .. } => "unmortgage",
            EventKind::JailEnter { .. } => "jail-enter",
            EventKind::JailStay { .. } => "jail-stay",
            EventKind::JailExit { .. } => "jail-exit",
            EventKind::Bankruptcy { .. } => "bankruptcy",
            EventKind::InvalidActionSubstituted { .. } => "invalid-action-substituted",
            EventKind::NoveltySignal => "novelty-signal",
            EventKind::GameEnd { .. } => "game-end",
        }
    }

    pub fn transfer(&self) -> Option<Transfer> {
        use EventKind::*;
        match self {
            PassGo { payer, payee, amount, .. }
            | Buy { payer, payee, amount, .. }
            | RentPaid { payer, payee, amount, .. }
            | TaxPaid { payer, payee, amount, .. }
            | CardEffect { payer, payee, amount, .. }
            | TradeAccepted { payer, payee, amount, .. }
            | Improve { payer, payee, amount, .. }
            | SellImprovement { payer, payee, amount, .. }
            | Mortgage { payer, payee, amount, .. }
            | Unmortgage { payer, payee, amount, .. }
            | JailExit { payer, payee, amount, .. }
            | Bankruptcy { payer, payee, amount, .. } => Some(Transfer {
                payer: *payer,
                payee: *payee,
                amount: *amount,
            }),
            _ => None,
        }
    }

    /// Players named anywhere in the payload (not counting the actor).
    pub fn referenced_players(&self) -> Vec<PlayerId> {
        let mut out = Vec::new();
        if let Some(t) = self.transfer() {
            out.extend(t.payer.player());
            out.extend(t.payee.player());
        }
        match self {
            EventKind::TradeProposed { offer }
            | EventKind::TradeAccepted { offer, .. }
            | EventKind::TradeRejected { offer, .. } => {
                out.push(offer.proposer);
                out.push(offer.responder);
            }
            EventKind::GameEnd { winner: Some(w), .. } => out.push(*w),
            _ => {}
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameResult {
    pub winner: Option<PlayerId>,
    pub turns: u64,
    pub round_trips: Vec<u32>,
    pub bankruptcy_order: Vec<PlayerId>,
    pub termination: Termination,
    /// Whether each seat raised the novelty signal during this game.
    pub novelty_signals: Vec<bool>,
    /// Substituted actions per seat.
    pub faults: Vec<u32>,
}

/// Serializes events plus the result as newline-delimited JSON.
pub fn write_event_log(events: &[GameEvent], result: &GameResult) -> String {
    let mut out = String::new();
    for event in events {
        out.push_str(&serde_json::to_string(event).expect("event serializes"));
        out.push('\n');
    }
    out.push_str(&serde_json::to_string(result).expect("result serializes"));
    out.push('\n');
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedLog {
    pub events: Vec<GameEvent>,
    pub result: Option<GameResult>,
    /// Set when the log stops before its game-end event and result line.
    pub truncated: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum LogError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: record after the final result")]
    TrailingRecord { line: usize },
}

/// Parses a log. A malformed final line is treated as an interrupted write
/// and reported through `truncated`; malformed lines elsewhere are errors.
pub fn parse_event_log(text: &str) -> Result<ParsedLog, LogError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut events = Vec::new();
    let mut result = None;
    let mut partial_tail = false;
    for (pos, &(line, raw)) in lines.iter().enumerate() {
        let is_last = pos + 1 == lines.len();
        if result.is_some() {
            return Err(LogError::TrailingRecord { line });
        }
        let value: serde_json::Value = match serde_json::from_str(raw) {
            Ok(v) => v,
            Err(_) if is_last => {
                partial_tail = true;
                break;
            }
            Err(e) => {
                return Err(LogError::Malformed {
                    line,
                    message: e.to_string(),
                })
            }
        };
        let parsed = if value.get("event").is_some() {
            serde_json::from_value::<GameEvent>(value).map(|e| events.push(e))
        } else {
            serde_json::from_value::<GameResult>(value).map(|r| result = Some(r))
        };
        if let Err(e) = parsed {
            if is_last {
                partial_tail = true;
            } else {
                return Err(LogError::Malformed {
                    line,
                    message: e.to_string(),
                });
            }
        }
    }
    let ended = matches!(events.last().map(|e| &e.kind), Some(EventKind::GameEnd { .. }));
    let truncated = partial_tail || result.is_none() || !ended;
    Ok(ParsedLog {
        events,
        result,
        truncated,
    })
}
