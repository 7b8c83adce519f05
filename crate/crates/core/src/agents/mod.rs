//! Decision interface between the engine and the agents that play it, plus
//! the built-in agents.

pub mod catalog;
pub mod heuristic;
pub mod hybrid;
pub mod simple;
mod view;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{BoardSchema, Money};
use crate::engine::{GameEvent, GameResult, Party, PlayerId};

pub use catalog::{build_agent, AgentBinding, AgentDescriptor, AgentError, AGENT_CATALOG};
pub use heuristic::{HeuristicAgent, HeuristicConfig, Style};
pub use hybrid::{BuyPolicy, HybridAgent, ValueBuyPolicy};
pub use simple::SimpleAgent;
pub use view::View;

/// A decision-maker bound to one seat. Each seat owns its own instance, so
/// several seats may share the same logic without sharing state.
pub trait Agent: Send {
    fn name(&self) -> &str;

    /// Called before the first decision of every game.
    fn game_start(&mut self, _seat: PlayerId, _schema: &Arc<BoardSchema>) {}

    fn decide(&mut self, request: &DecisionRequest) -> Result<AgentAction, AgentFault>;

    fn game_end(&mut self, _result: &GameResult) {}
}

/// Why an agent could not produce a usable action. The engine never fails
/// on these; it substitutes the default action and logs the fault.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AgentFault {
    #[error("no response within {0:?}")]
    Timeout(Duration),
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("connection lost: {0}")]
    ConnectionLost(String),
    #[error("action not in the legal menu: {0}")]
    IllegalAction(String),
    #[error("protocol version {got} not supported (expected {expected})")]
    VersionMismatch { got: u32, expected: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRequest {
    pub seat: PlayerId,
    pub decision: DecisionPoint,
    pub snapshot: Snapshot,
    pub menu: LegalMenu,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "point", rename_all = "kebab-case")]
pub enum DecisionPoint {
    BuyOrDecline { property: String, price: Money },
    PreRollActions,
    JailChoice { attempts_used: u8 },
    RespondToTrade { offer: TradeOffer },
    RaiseCash { amount: Money, creditor: Party },
    ProposeTrades,
}

impl DecisionPoint {
    pub fn label(&self) -> &'static str {
        match self {
            DecisionPoint::BuyOrDecline { .. } => "buy-or-decline",
            DecisionPoint::PreRollActions => "pre-roll-actions",
            DecisionPoint::JailChoice { .. } => "jail-choice",
            DecisionPoint::RespondToTrade { .. } => "respond-to-trade",
            DecisionPoint::RaiseCash { .. } => "raise-cash",
            DecisionPoint::ProposeTrades => "propose-trades",
        }
    }
}

/// Public information only: no deck order, no rng state, no other agent's
/// reasoning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub turn: u64,
    pub players: Vec<PublicPlayer>,
    pub properties: BTreeMap<String, PublicProperty>,
    pub recent_events: Vec<GameEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicPlayer {
    pub position: usize,
    pub cash: Money,
    pub alive: bool,
    pub in_jail: bool,
    pub jail_cards: usize,
    pub round_trips: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicProperty {
    pub owner: Option<PlayerId>,
    pub level: u8,
    pub mortgaged: bool,
}

/// Concrete actions the engine will accept. Trade offers are validated
/// against the game state separately when `trades_allowed` is set.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LegalMenu {
    pub actions: Vec<ActionKind>,
    pub trades_allowed: bool,
}

impl LegalMenu {
    pub fn permits(&self, kind: &ActionKind) -> bool {
        match kind {
            ActionKind::ProposeTrades { .. } => self.trades_allowed,
            other => self.actions.contains(other),
        }
    }

    pub fn improvable(&self) -> impl Iterator<Item = &str> {
        self.actions.iter().filter_map(|a| match a {
            ActionKind::Improve { property } => Some(property.as_str()),
            _ => None,
        })
    }

    pub fn mortgageable(&self) -> impl Iterator<Item = &str> {
        self.actions.iter().filter_map(|a| match a {
            ActionKind::Mortgage { property } => Some(property.as_str()),
            _ => None,
        })
    }

    pub fn unmortgageable(&self) -> impl Iterator<Item = &str> {
        self.actions.iter().filter_map(|a| match a {
            ActionKind::Unmortgage { property } => Some(property.as_str()),
            _ => None,
        })
    }

    pub fn sellable(&self) -> impl Iterator<Item = &str> {
        self.actions.iter().filter_map(|a| match a {
            ActionKind::SellImprovement { property } => Some(property.as_str()),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentAction {
    #[serde(flatten)]
    pub kind: ActionKind,
    /// Latched: once raised within a tournament it stays raised.
    #[serde(default)]
    pub novelty_detected: bool,
}

impl AgentAction {
    pub fn new(kind: ActionKind) -> Self {
        AgentAction {
            kind,
            novelty_detected: false,
        }
    }
}

impl From<ActionKind> for AgentAction {
    fn from(kind: ActionKind) -> Self {
        AgentAction::new(kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum ActionKind {
    Buy,
    Decline,
    Improve { property: String },
    SellImprovement { property: String },
    Mortgage { property: String },
    Unmortgage { property: String },
    ProposeTrades { offers: Vec<TradeOffer> },
    EndPhase,
    PayJailFine,
    UseJailCard,
    RollForDoubles,
    AcceptTrade,
    RejectTrade,
    DeclareBankruptcy,
}

impl ActionKind {
    pub fn label(&self) -> &'static str {
        match self {
            ActionKind::Buy => "buy",
            ActionKind::Decline => "decline",
            ActionKind::Improve { .. } => "improve",
            ActionKind::SellImprovement { .. } => "sell-improvement",
            ActionKind::Mortgage { .. } => "mortgage",
            ActionKind::Unmortgage { .. } => "unmortgage",
            ActionKind::ProposeTrades { .. } => "propose-trades",
            ActionKind::EndPhase => "end-phase",
            ActionKind::PayJailFine => "pay-jail-fine",
            ActionKind::UseJailCard => "use-jail-card",
            ActionKind::RollForDoubles => "roll-for-doubles",
            ActionKind::AcceptTrade => "accept-trade",
            ActionKind::RejectTrade => "reject-trade",
            ActionKind::DeclareBankruptcy => "declare-bankruptcy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradeOffer {
    pub proposer: PlayerId,
    pub responder: PlayerId,
    #[serde(default)]
    pub offered: Vec<String>,
    #[serde(default)]
    pub offered_cash: Money,
    #[serde(default)]
    pub requested: Vec<String>,
    #[serde(default)]
    pub requested_cash: Money,
}
