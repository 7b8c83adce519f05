//! Rule-based agents. `H1` buys with a reserve, builds evenly, liquidates
//! before going bankrupt and sells a property for cash when short. `H2` adds
//! two-way trades aimed at completing its own color groups.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    ActionKind, Agent, AgentAction, AgentFault, BuyPolicy, DecisionPoint, DecisionRequest, LegalMenu, TradeOffer, View,
};
use crate::board::{BoardSchema, Money};
use crate::engine::{Board, PlayerId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Style {
    H1,
    H2,
}

/// Tunable thresholds. None of these come from the rules of the game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeuristicConfig {
    /// Cash kept in hand after buying or building.
    pub cash_reserve: Money,
    /// Cash kept in hand after lifting a mortgage.
    pub unmortgage_reserve: Money,
    /// Below this the agent tries to sell a property for cash.
    pub low_cash: Money,
    /// Margin over list price asked when selling and offered when buying.
    pub offer_premium: f64,
    /// Worth of a property that completes a color group, as a multiple of
    /// its price.
    pub monopoly_weight: f64,
    /// Turns before an identical offer is sent again.
    pub retry_after: u64,
    /// Most offers sent in one trade phase.
    pub max_offers: usize,
    /// Most improvements bought in one turn.
    pub builds_per_turn: u32,
    /// Game turns (all seats counted) to wait after an improvement before
    /// buying the next.
    pub build_interval: u64,
    /// Cash above which the interval is ignored.
    pub rich_cash: Money,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            cash_reserve: 150,
            unmortgage_reserve: 500,
            low_cash: 150,
            offer_premium: 1.25,
            monopoly_weight: 3.0,
            retry_after: 10,
            max_offers: 3,
            builds_per_turn: 1,
            build_interval: 500,
            rich_cash: 50_000,
        }
    }
}

type OfferKey = (PlayerId, Vec<String>, Vec<String>);

pub struct HeuristicAgent {
    name: String,
    style: Style,
    config: HeuristicConfig,
    board: Option<Board>,
    /// Offers already sent this game, keyed by content, with the turn sent.
    sent: BTreeMap<OfferKey, u64>,
    /// Turn of the last improvement and how many were bought in it.
    built: (u64, u32),
}

impl HeuristicAgent {
    pub fn new(style: Style) -> Self {
        Self::with_config(style, HeuristicConfig::default())
    }

    pub fn with_config(style: Style, config: HeuristicConfig) -> Self {
        let name = match style {
            Style::H1 => "h1",
            Style::H2 => "h2",
        };
        HeuristicAgent {
            name: name.to_string(),
            style,
            config,
            board: None,
            sent: BTreeMap::new(),
            built: (0, 0),
        }
    }

    pub fn config(&self) -> &HeuristicConfig {
        &self.config
    }

    fn ensure_board(&mut self) {
        if self.board.is_none() {
            self.board = Some(Board::new(Arc::new(BoardSchema::us_default())));
        }
    }

    fn buy(&self, view: &View, property: &str, price: Money) -> bool {
        let cash = view.cash();
        if cash < price {
            return false;
        }
        if view.completes_group(view.seat, property) {
            return true;
        }
        if view.opponents().any(|q| view.completes_group(q, property)) {
            return true;
        }
        cash - price >= self.config.cash_reserve
    }

    fn pre_roll(&mut self, view: &View, menu: &LegalMenu) -> ActionKind {
        let cash = view.cash();
        let schema = &view.board.schema;
        let mut lift: Vec<&str> = menu.unmortgageable().collect();
        lift.sort_by_key(|p| !view.holds_group(view.seat, p));
        for property in lift {
            let cost = schema.unmortgage_cost(view.price(property));
            if cash - cost >= self.config.unmortgage_reserve {
                return ActionKind::Unmortgage {
                    property: property.to_string(),
                };
            }
        }
        let target = menu
            .improvable()
            .min_by_key(|p| (view.level(p), view.board.index_of(p).unwrap_or(usize::MAX)));
        let turn = view.snapshot.turn;
        let waiting =
            self.built.1 > 0 && turn < self.built.0 + self.config.build_interval && cash < self.config.rich_cash;
        if self.built.0 != turn && !waiting {
            self.built = (turn, 0);
        }
        let may_build = self.built.0 == turn && self.built.1 < self.config.builds_per_turn;
        if let Some(property) = target.filter(|_| may_build) {
            if let Some(cost) = view.build_cost(property) {
                if cash - cost >= self.config.cash_reserve {
                    self.built.1 += 1;
                    return ActionKind::Improve {
                        property: property.to_string(),
                    };
                }
            }
        }
        ActionKind::EndPhase
    }

    fn raise_cash(&self, view: &View, menu: &LegalMenu) -> ActionKind {
        let property = menu
            .mortgageable()
            .find(|p| !view.holds_group(view.seat, p))
            .map(|p| ActionKind::Mortgage { property: p.to_string() })
            .or_else(|| {
                menu.sellable()
                    .next()
                    .map(|p| ActionKind::SellImprovement { property: p.to_string() })
            })
            .or_else(|| menu.mortgageable().next().map(|p| ActionKind::Mortgage { property: p.to_string() }));
        property.unwrap_or(ActionKind::DeclareBankruptcy)
    }

    fn jail(&self, view: &View, menu: &LegalMenu) -> ActionKind {
        if menu.permits(&ActionKind::UseJailCard) {
            return ActionKind::UseJailCard;
        }
        let fine = view.board.schema.constants.jail_fine;
        if menu.permits(&ActionKind::PayJailFine) && view.cash() - fine >= self.config.cash_reserve && view.unowned_count() > 0 {
            return ActionKind::PayJailFine;
        }
        ActionKind::RollForDoubles
    }

    fn respond(&self, view: &View, offer: &TradeOffer) -> ActionKind {
        let me = view.seat;
        let cash = view.cash();
        if offer.requested_cash > cash {
            return ActionKind::RejectTrade;
        }
        if offer.requested.iter().any(|p| view.holds_group(me, p)) {
            return ActionKind::RejectTrade;
        }
        let accept = match self.style {
            Style::H2 => view.monopolies_after(me, &offer.offered, &offer.requested) > view.monopolies(me),
            Style::H1 => {
                let gained: f64 = offer
                    .offered
                    .iter()
                    .map(|p| {
                        let price = view.price(p) as f64;
                        if view.mortgaged(p) {
                            price / 2.0
                        } else if view.board.street(p).is_some()
                            && view.holds_group_after(me, p, &offer.offered, &offer.requested)
                        {
                            price * self.config.monopoly_weight
                        } else {
                            price
                        }
                    })
                    .sum();
                let lost: f64 = offer.requested.iter().map(|p| view.price(p) as f64).sum();
                let net = gained - lost + (offer.offered_cash - offer.requested_cash) as f64;
                net > 0.0 && cash - offer.requested_cash >= self.config.cash_reserve.min(cash)
            }
        };
        if accept {
            ActionKind::AcceptTrade
        } else {
            ActionKind::RejectTrade
        }
    }

    /// A property not worth keeping: tradeable, unmortgaged, outside any
    /// group the agent holds or is collecting.
    fn spare(&self, view: &View, property: &str) -> bool {
        let me = view.seat;
        if !view.tradeable(me, property) || view.mortgaged(property) || view.holds_group(me, property) {
            return false;
        }
        match view.board.group_of(property) {
            Some(group) => {
                let mine = group.iter().filter(|s| view.owner(s) == Some(me)).count();
                mine * 2 < group.len()
            }
            None => true,
        }
    }

    /// Offer a single property to the richest opponent for cash.
    fn cash_offer(&self, view: &View) -> Option<TradeOffer> {
        let me = view.seat;
        let buyer = view.richest_opponent()?;
        let buyer_cash = view.cash_of(buyer);
        let mut candidates: Vec<&str> = view.owned_by(me).filter(|p| self.spare(view, p)).collect();
        candidates.sort_by_key(|p| (!view.completes_group(buyer, p), std::cmp::Reverse(view.price(p))));
        candidates.into_iter().find_map(|p| {
            let price = view.price(p);
            let ask = ((price as f64) * self.config.offer_premium).round() as Money;
            let ask = if ask <= buyer_cash { ask } else { price };
            (ask <= buyer_cash && ask > 0).then(|| TradeOffer {
                proposer: me,
                responder: buyer,
                offered: vec![p.to_string()],
                offered_cash: 0,
                requested: vec![],
                requested_cash: ask,
            })
        })
    }

    /// Two-way offers requesting the streets that would complete one of the
    /// agent's groups, at most one per counterparty.
    fn group_offers(&self, view: &View) -> Vec<TradeOffer> {
        let me = view.seat;
        let mut offers: Vec<TradeOffer> = Vec::new();
        for group in view.board.groups().values() {
            let mine = group.iter().filter(|s| view.owner(s) == Some(me)).count();
            let missing: Vec<&String> = group.iter().filter(|s| view.owner(s) != Some(me)).collect();
            if mine == 0 || missing.is_empty() || mine * 2 < group.len() {
                continue;
            }
            let Some(holder) = view.owner(missing[0]) else { continue };
            if holder == me
                || !view.snapshot.players[holder].alive
                || offers.iter().any(|o| o.responder == holder)
                || !missing.iter().all(|s| view.tradeable(holder, s))
            {
                continue;
            }
            let requested: Vec<String> = missing.iter().map(|s| s.to_string()).collect();
            let target = requested.iter().map(|s| view.price(s)).sum::<Money>() as f64 * self.config.offer_premium;
            let mut spares: Vec<&str> = view.owned_by(me).filter(|p| self.spare(view, p)).collect();
            let mutual = spares.iter().copied().find(|p| view.completes_group(holder, p));
            let offered: Vec<String> = match mutual {
                Some(p) => vec![p.to_string()],
                None => {
                    spares.sort_by_key(|p| std::cmp::Reverse(view.price(p)));
                    let single = spares.iter().rev().find(|p| view.price(p) as f64 >= target);
                    match single {
                        Some(p) => vec![p.to_string()],
                        None => spares.iter().take(3).map(|p| p.to_string()).collect(),
                    }
                }
            };
            let value: Money = offered.iter().map(|p| view.price(p)).sum();
            let top_up = (target - value as f64).max(0.0).ceil() as Money;
            let top_up = if mutual.is_some() { 0 } else { top_up };
            if offered.is_empty() && top_up == 0 {
                continue;
            }
            if view.cash() - top_up < self.config.cash_reserve || top_up > view.cash() {
                continue;
            }
            offers.push(TradeOffer {
                proposer: me,
                responder: holder,
                offered,
                offered_cash: top_up,
                requested,
                requested_cash: 0,
            });
        }
        offers
    }

    fn propose(&mut self, view: &View, turn: u64) -> ActionKind {
        let mut offers = Vec::new();
        if self.style == Style::H2 {
            offers.extend(self.group_offers(view));
        }
        if view.cash() < self.config.low_cash {
            offers.extend(self.cash_offer(view));
        }
        let retry = self.config.retry_after;
        let sent = &mut self.sent;
        let mut fresh = Vec::new();
        for offer in offers {
            if fresh.len() >= self.config.max_offers {
                break;
            }
            let key = (offer.responder, offer.offered.clone(), offer.requested.clone());
            if sent.get(&key).is_some_and(|&t| turn < t + retry) {
                continue;
            }
            sent.insert(key, turn);
            fresh.push(offer);
        }
        if fresh.is_empty() {
            ActionKind::EndPhase
        } else {
            ActionKind::ProposeTrades { offers: fresh }
        }
    }

    /// Decision logic, optionally with the buy rule replaced.
    pub(crate) fn decide_with(&mut self, request: &DecisionRequest, policy: Option<&mut dyn BuyPolicy>) -> ActionKind {
        self.ensure_board();
        let board = self.board.take().expect("board initialised");
        let view = View::new(&board, &request.snapshot, request.seat);
        let kind = match &request.decision {
            DecisionPoint::BuyOrDecline { property, price } => {
                let buy = match policy {
                    Some(policy) => policy.buy(&view, property, *price),
                    None => self.buy(&view, property, *price),
                };
                if buy {
                    ActionKind::Buy
                } else {
                    ActionKind::Decline
                }
            }
            DecisionPoint::PreRollActions => self.pre_roll(&view, &request.menu),
            DecisionPoint::JailChoice { .. } => self.jail(&view, &request.menu),
            DecisionPoint::RespondToTrade { offer } => self.respond(&view, offer),
            DecisionPoint::RaiseCash { .. } => self.raise_cash(&view, &request.menu),
            DecisionPoint::ProposeTrades => self.propose(&view, request.snapshot.turn),
        };
        self.board = Some(board);
        kind
    }
}

impl Agent for HeuristicAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn game_start(&mut self, _seat: PlayerId, schema: &Arc<BoardSchema>) {
        self.board = Some(Board::new(schema.clone()));
        self.sent.clear();
        self.built = (0, 0);
    }

    fn decide(&mut self, request: &DecisionRequest) -> Result<AgentAction, AgentFault> {
        Ok(self.decide_with(request, None).into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{PublicPlayer, PublicProperty, Snapshot};
    use crate::engine::Party;

    fn snapshot(cash: [Money; 4]) -> Snapshot {
        let board = Board::new(Arc::new(BoardSchema::us_default()));
        Snapshot {
            turn: 5,
            players: cash
                .iter()
                .map(|&cash| PublicPlayer {
                    position: 0,
                    cash,
                    alive: true,
                    in_jail: false,
                    jail_cards: 0,
                    round_trips: 0,
                })
                .collect(),
            properties: board
                .properties()
                .iter()
                .map(|p| {
                    (
                        p.clone(),
                        PublicProperty {
                            owner: None,
                            level: 0,
                            mortgaged: false,
                        },
                    )
                })
                .collect(),
            recent_events: vec![],
        }
    }

    fn own(s: &mut Snapshot, player: PlayerId, names: &[&str]) {
        for n in names {
            s.properties.get_mut(*n).unwrap().owner = Some(player);
        }
    }

    fn ask(agent: &mut HeuristicAgent, decision: DecisionPoint, snapshot: Snapshot, menu: LegalMenu) -> ActionKind {
        let req = DecisionRequest {
            seat: 0,
            decision,
            snapshot,
            menu,
        };
        agent.decide(&req).unwrap().kind
    }

    fn improve(p: &str) -> ActionKind {
        ActionKind::Improve { property: p.into() }
    }

    #[test]
    fn builds_on_least_improved_lowest_index() {
        let mut s = snapshot([1500, 1500, 1500, 1500]);
        own(&mut s, 0, &["Oriental Avenue", "Vermont Avenue", "Connecticut Avenue"]);
        s.properties.get_mut("Oriental Avenue").unwrap().level = 1;
        let menu = LegalMenu {
            actions: vec![improve("Vermont Avenue"), improve("Connecticut Avenue"), ActionKind::EndPhase],
            trades_allowed: false,
        };
        let mut h1 = HeuristicAgent::new(Style::H1);
        assert_eq!(ask(&mut h1, DecisionPoint::PreRollActions, s, menu), improve("Vermont Avenue"));
    }

    #[test]
    fn keeps_reserve_when_building() {
        let mut s = snapshot([200, 1500, 1500, 1500]);
        own(&mut s, 0, &["Park Place", "Boardwalk"]);
        let menu = LegalMenu {
            actions: vec![improve("Park Place"), improve("Boardwalk"), ActionKind::EndPhase],
            trades_allowed: false,
        };
        let mut h1 = HeuristicAgent::new(Style::H1);
        assert_eq!(ask(&mut h1, DecisionPoint::PreRollActions, s, menu), ActionKind::EndPhase);
    }

    #[test]
    fn mortgages_before_bankruptcy() {
        let mut s = snapshot([10, 1500, 1500, 1500]);
        own(&mut s, 0, &["Baltic Avenue"]);
        let menu = LegalMenu {
            actions: vec![
                ActionKind::Mortgage {
                    property: "Baltic Avenue".into(),
                },
                ActionKind::DeclareBankruptcy,
                ActionKind::EndPhase,
            ],
            trades_allowed: true,
        };
        let d = DecisionPoint::RaiseCash {
            amount: 50,
            creditor: Party::Player(1),
        };
        let mut h1 = HeuristicAgent::new(Style::H1);
        assert_eq!(
            ask(&mut h1, d, s, menu),
            ActionKind::Mortgage {
                property: "Baltic Avenue".into()
            }
        );
    }

    #[test]
    fn low_cash_sells_to_richest_opponent() {
        let mut s = snapshot([100, 300, 900, 500]);
        own(&mut s, 0, &["Reading Railroad"]);
        let menu = LegalMenu {
            actions: vec![ActionKind::EndPhase],
            trades_allowed: true,
        };
        let mut h1 = HeuristicAgent::new(Style::H1);
        let ActionKind::ProposeTrades { offers } = ask(&mut h1, DecisionPoint::ProposeTrades, s, menu) else {
            panic!("expected an offer");
        };
        assert_eq!(offers.len(), 1);
        assert_eq!(offers[0].responder, 2);
        assert_eq!(offers[0].offered, vec!["Reading Railroad".to_string()]);
        assert!(offers[0].requested.is_empty());
        assert_eq!(offers[0].requested_cash, 250);
    }

    #[test]
    fn h2_requests_missing_orange_from_each_holder() {
        let mut s = snapshot([1500, 1500, 1500, 1500]);
        own(&mut s, 0, &["St. James Place", "Tennessee Avenue", "Kentucky Avenue", "Indiana Avenue", "Short Line"]);
        own(&mut s, 1, &["New York Avenue"]);
        own(&mut s, 2, &["Illinois Avenue"]);
        let menu = LegalMenu {
            actions: vec![ActionKind::EndPhase],
            trades_allowed: true,
        };
        let mut h2 = HeuristicAgent::new(Style::H2);
        let ActionKind::ProposeTrades { offers } = ask(&mut h2, DecisionPoint::ProposeTrades, s, menu) else {
            panic!("expected offers");
        };
        assert_eq!(offers.len(), 2);
        let to_one = offers.iter().find(|o| o.responder == 1).unwrap();
        assert_eq!(to_one.requested, vec!["New York Avenue".to_string()]);
        assert_eq!(to_one.offered, vec!["Short Line".to_string()]);
        let to_two = offers.iter().find(|o| o.responder == 2).unwrap();
        assert_eq!(to_two.requested, vec!["Illinois Avenue".to_string()]);
        assert!(!to_two.offered.is_empty() || to_two.offered_cash > 0);
    }

    #[test]
    fn repeated_offer_waits() {
        let mut s = snapshot([1500, 1500, 1500, 1500]);
        own(&mut s, 0, &["St. James Place", "Tennessee Avenue", "Baltic Avenue"]);
        own(&mut s, 1, &["New York Avenue"]);
        let menu = LegalMenu {
            actions: vec![ActionKind::EndPhase],
            trades_allowed: true,
        };
        let mut h2 = HeuristicAgent::new(Style::H2);
        let first = ask(&mut h2, DecisionPoint::ProposeTrades, s.clone(), menu.clone());
        assert!(matches!(first, ActionKind::ProposeTrades { .. }));
        assert_eq!(ask(&mut h2, DecisionPoint::ProposeTrades, s.clone(), menu.clone()), ActionKind::EndPhase);
        s.turn += 10;
        assert!(matches!(ask(&mut h2, DecisionPoint::ProposeTrades, s, menu), ActionKind::ProposeTrades { .. }));
    }

    #[test]
    fn h2_rejects_offer_breaking_monopoly() {
        let mut s = snapshot([1500, 1500, 1500, 1500]);
        own(&mut s, 0, &["Park Place", "Boardwalk"]);
        own(&mut s, 1, &["Mediterranean Avenue"]);
        let offer = TradeOffer {
            proposer: 1,
            responder: 0,
            offered: vec!["Mediterranean Avenue".into()],
            offered_cash: 2000,
            requested: vec!["Boardwalk".into()],
            requested_cash: 0,
        };
        let menu = LegalMenu {
            actions: vec![ActionKind::AcceptTrade, ActionKind::RejectTrade],
            trades_allowed: false,
        };
        for style in [Style::H1, Style::H2] {
            let mut agent = HeuristicAgent::new(style);
            let d = DecisionPoint::RespondToTrade { offer: offer.clone() };
            assert_eq!(ask(&mut agent, d, s.clone(), menu.clone()), ActionKind::RejectTrade);
        }
    }

    #[test]
    fn h2_accepts_completing_swap() {
        let mut s = snapshot([1500, 1500, 1500, 1500]);
        own(&mut s, 0, &["Park Place", "Baltic Avenue"]);
        own(&mut s, 1, &["Boardwalk", "Mediterranean Avenue"]);
        let offer = TradeOffer {
            proposer: 1,
            responder: 0,
            offered: vec!["Boardwalk".into()],
            offered_cash: 0,
            requested: vec!["Baltic Avenue".into()],
            requested_cash: 0,
        };
        let menu = LegalMenu {
            actions: vec![ActionKind::AcceptTrade, ActionKind::RejectTrade],
            trades_allowed: false,
        };
        let mut h2 = HeuristicAgent::new(Style::H2);
        let d = DecisionPoint::RespondToTrade { offer };
        assert_eq!(ask(&mut h2, d, s, menu), ActionKind::AcceptTrade);
    }
}
