//! Stand-in for a partly learned agent: H2 heuristics everywhere except the
//! buy decision, which goes through a replaceable policy. Also carries a
//! simple novelty detector.

use std::sync::Arc;

use super::{ActionKind, Agent, AgentAction, AgentFault, DecisionRequest, HeuristicAgent, Style, View};
use crate::board::{BoardSchema, Money};
use crate::engine::{EventKind, GameResult, PlayerId};

/// The buy-or-decline decision. A trained model would implement this.
pub trait BuyPolicy: Send {
    fn buy(&mut self, view: &View, property: &str, price: Money) -> bool;
}

/// Buys anything that completes or blocks a color group, and otherwise
/// anything that leaves `reserve` in hand.
#[derive(Debug, Clone)]
pub struct ValueBuyPolicy {
    pub reserve: Money,
}

impl Default for ValueBuyPolicy {
    fn default() -> Self {
        ValueBuyPolicy { reserve: 100 }
    }
}

impl BuyPolicy for ValueBuyPolicy {
    fn buy(&mut self, view: &View, property: &str, price: Money) -> bool {
        let cash = view.cash();
        if cash < price {
            return false;
        }
        let strategic =
            view.completes_group(view.seat, property) || view.opponents().any(|q| view.completes_group(q, property));
        strategic || cash - price >= self.reserve
    }
}

/// What the detector remembers about the first game it saw.
#[derive(Debug, Clone, PartialEq)]
struct Baseline {
    schema_hash: String,
    dice: u32,
    faces: u32,
    slots: usize,
}

pub struct HybridAgent {
    inner: HeuristicAgent,
    policy: Box<dyn BuyPolicy>,
    baseline: Option<Baseline>,
    detected: bool,
}

impl Default for HybridAgent {
    fn default() -> Self {
        Self::new(Box::new(ValueBuyPolicy::default()))
    }
}

impl HybridAgent {
    pub fn new(policy: Box<dyn BuyPolicy>) -> Self {
        HybridAgent {
            inner: HeuristicAgent::new(Style::H2),
            policy,
            baseline: None,
            detected: false,
        }
    }

    pub fn detected(&self) -> bool {
        self.detected
    }

    /// Dice or positions the baseline board cannot produce.
    fn observe(&mut self, request: &DecisionRequest) {
        let Some(base) = &self.baseline else { return };
        let odd = request.snapshot.recent_events.iter().any(|e| match &e.kind {
            EventKind::Roll { dice } => dice.len() != base.dice as usize || dice.iter().any(|&d| d > base.faces),
            EventKind::Move { to, .. } => *to >= base.slots,
            _ => false,
        });
        let odd = odd || request.snapshot.players.iter().any(|p| p.position >= base.slots);
        self.detected |= odd;
    }
}

impl Agent for HybridAgent {
    fn name(&self) -> &str {
        "hybrid"
    }

    fn game_start(&mut self, seat: PlayerId, schema: &Arc<BoardSchema>) {
        let seen = Baseline {
            schema_hash: schema.content_hash(),
            dice: schema.dice.count,
            faces: schema.dice.faces,
            slots: schema.slots.len(),
        };
        match &self.baseline {
            None => self.baseline = Some(seen),
            Some(base) => self.detected |= base.schema_hash != seen.schema_hash,
        }
        self.inner.game_start(seat, schema);
    }

    fn decide(&mut self, request: &DecisionRequest) -> Result<AgentAction, AgentFault> {
        self.observe(request);
        let kind: ActionKind = self.inner.decide_with(request, Some(self.policy.as_mut()));
        Ok(AgentAction {
            kind,
            novelty_detected: self.detected,
        })
    }

    fn game_end(&mut self, result: &GameResult) {
        self.inner.game_end(result);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detector_latches_on_schema_change() {
        let mut agent = HybridAgent::default();
        let base = Arc::new(BoardSchema::us_default());
        agent.game_start(0, &base);
        agent.game_start(0, &base);
        assert!(!agent.detected());
        let mut changed = BoardSchema::us_default();
        changed.dice.count = 3;
        agent.game_start(0, &Arc::new(changed));
        assert!(agent.detected());
        agent.game_start(0, &base);
        assert!(agent.detected());
    }
}
