use super::{ActionKind, Agent, AgentAction, AgentFault, DecisionPoint, DecisionRequest};

/// Buys whatever it can afford and otherwise does as little as possible:
/// no trades, no improvements, and bankruptcy rather than liquidation.
#[derive(Debug, Clone, Default)]
pub struct SimpleAgent;

impl SimpleAgent {
    pub fn new() -> Self {
        SimpleAgent
    }
}

impl Agent for SimpleAgent {
    fn name(&self) -> &str {
        "simple"
    }

    fn decide(&mut self, request: &DecisionRequest) -> Result<AgentAction, AgentFault> {
        let cash = request.snapshot.players.get(request.seat).map_or(0, |p| p.cash);
        let kind = match &request.decision {
            DecisionPoint::BuyOrDecline { price, .. } if cash >= *price => ActionKind::Buy,
            DecisionPoint::BuyOrDecline { .. } => ActionKind::Decline,
            DecisionPoint::JailChoice { .. } if request.menu.permits(&ActionKind::UseJailCard) => ActionKind::UseJailCard,
            DecisionPoint::JailChoice { .. } => ActionKind::RollForDoubles,
            DecisionPoint::RespondToTrade { .. } => ActionKind::RejectTrade,
            DecisionPoint::RaiseCash { .. } => ActionKind::DeclareBankruptcy,
            DecisionPoint::PreRollActions | DecisionPoint::ProposeTrades => ActionKind::EndPhase,
        };
        Ok(kind.into())
    }
}
